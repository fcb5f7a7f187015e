use std::fmt;
use std::str::FromStr;

use super::SurfaceError;
use crate::jet::JetDiffeo;

/// A generator `α_i` or `β_i` of the fundamental group (1-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Alpha(usize),
    Beta(usize),
}

impl Generator {
    pub fn index(self) -> usize {
        match self {
            Generator::Alpha(i) | Generator::Beta(i) => i,
        }
    }

    /// Position in the ordering `α_1..α_g, β_1..β_g`.
    pub fn slot(self, genus: usize) -> usize {
        match self {
            Generator::Alpha(i) => i - 1,
            Generator::Beta(i) => genus + i - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }
}

/// A reduced word in the generators and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoopWord {
    letters: Vec<Letter>,
}

impl LoopWord {
    pub fn new(letters: Vec<Letter>, genus: usize) -> Result<Self, SurfaceError> {
        for l in &letters {
            let index = l.generator.index();
            if index == 0 || index > genus {
                return Err(SurfaceError::GeneratorOutOfRange { index, genus });
            }
        }
        if let Some(pos) = letters.windows(2).position(|w| w[0].inv() == w[1]) {
            return Err(SurfaceError::NotReduced(pos));
        }
        Ok(LoopWord { letters })
    }

    pub fn generator(g: Generator) -> Self {
        LoopWord {
            letters: vec![Letter::new(g, false)],
        }
    }

    /// `α_1 β_1 α_1⁻¹ β_1⁻¹ ... α_g β_g α_g⁻¹ β_g⁻¹`.
    pub fn surface_relator(genus: usize) -> Self {
        let letters = (1..=genus)
            .flat_map(|i| {
                [
                    Letter::new(Generator::Alpha(i), false),
                    Letter::new(Generator::Beta(i), false),
                    Letter::new(Generator::Alpha(i), true),
                    Letter::new(Generator::Beta(i), true),
                ]
            })
            .collect();
        LoopWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `ρ(x_1) ∘ ρ(x_2) ∘ ...` for `rho` indexed `α_1..α_g, β_1..β_g`.
    pub fn evaluate(&self, rho: &[JetDiffeo]) -> Result<JetDiffeo, SurfaceError> {
        if !rho.len().is_multiple_of(2) || rho.is_empty() {
            return Err(SurfaceError::WrongTupleSize {
                expected: 2 * (rho.len() / 2).max(1),
                got: rho.len(),
            });
        }
        let genus = rho.len() / 2;
        let order = rho[0].order();
        let mut acc = JetDiffeo::identity(order);
        for l in &self.letters {
            let index = l.generator.index();
            if index == 0 || index > genus {
                return Err(SurfaceError::GeneratorOutOfRange { index, genus });
            }
            let f = &rho[l.generator.slot(genus)];
            let f = if l.inverse { f.inverse() } else { f.clone() };
            acc = acc.compose(&f);
        }
        Ok(acc)
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (n, l) in self.letters.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            let (c, i) = match l.generator {
                Generator::Alpha(i) => ('a', i),
                Generator::Beta(i) => ('b', i),
            };
            write!(f, "{c}{i}")?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// Parses words like `a1 b1 a1^-1 b1^-1`; the genus is checked by [`LoopWord::new`].
impl FromStr for LoopWord {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SurfaceError::BadWord(s.to_string());
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (body, inverse) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let mut chars = body.chars();
            let kind = chars.next().ok_or_else(bad)?;
            let index: usize = chars.as_str().parse().map_err(|_| bad())?;
            let generator = match kind {
                'a' => Generator::Alpha(index),
                'b' => Generator::Beta(index),
                _ => return Err(bad()),
            };
            letters.push(Letter::new(generator, inverse));
        }
        let genus = letters.iter().map(|l| l.generator.index()).max().unwrap_or(0);
        LoopWord::new(letters, genus)
    }
}
