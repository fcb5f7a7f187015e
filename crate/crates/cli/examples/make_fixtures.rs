//! Regenerates the job files under `fixtures/`.

use std::path::Path;

use nbhd_cli::job::{Invariant, JobFile};
use nbhd_core::invariant::{reduce_phi, BifoliatedInvariant};
use nbhd_core::surface::{SurfaceModel, UedaFormData};
use nbhd_core::synth::{self, bifoliated, ueda_form, TupleShape};
use nbhd_core::{DiffeoTuple, JetDiffeo, Scalar};

fn write(dir: &Path, name: &str, surface: &SurfaceModel, k: usize, omega: Option<&UedaFormData>, inv: Invariant) {
    let job = JobFile::from_parts(surface, Some(k), omega, &inv);
    std::fs::write(dir.join(name), job.to_toml()).unwrap();
}

fn with_coeff(f: &JetDiffeo, d: usize, c: Scalar) -> JetDiffeo {
    let mut s = f.series().clone();
    s.set_coeff(d, c);
    JetDiffeo::new(s).unwrap()
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let g2 = SurfaceModel::standard(2).unwrap();
    let tau3 = [["2*i", "1", "0"], ["1", "2*i", "0"], ["0", "0", "i"]];
    let g3 = SurfaceModel::new(
        3,
        tau3.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect(),
        nbhd_core::surface::default_zero_labels(3),
    )
    .unwrap();

    let mut rng = synth::rng(2024);
    let k = 1;
    let omega = ueda_form(&mut rng, &g2, k);
    let canonical = bifoliated(&mut rng, 2, k, 6, &omega, TupleShape::Canonical);
    write(&dir, "valid_g2_k1.toml", &g2, k, Some(&omega), Invariant::Bifoliated(canonical.clone()));
    let nb = reduce_phi(&canonical).unwrap();
    write(&dir, "neighborhood_g2_k1.toml", &g2, k, Some(&omega), Invariant::Neighborhood(nb));

    let t = canonical.transports().entries()[0].clone();
    let flipped = with_coeff(&t, k + 1, -&t.coeff(k + 1));
    let wrong = canonical.with_transports(DiffeoTuple::new(vec![flipped]).unwrap()).unwrap();
    write(&dir, "wrong_sign_g2_k1.toml", &g2, k, Some(&omega), Invariant::Bifoliated(wrong));

    let k = 2;
    let omega3 = ueda_form(&mut rng, &g3, k);
    let abelian = bifoliated(&mut rng, 3, k, 8, &omega3, TupleShape::Abelian);
    write(&dir, "valid_g3_k2.toml", &g3, k, Some(&omega3), Invariant::Bifoliated(abelian));

    let omega = ueda_form(&mut rng, &g2, k);
    let a = bifoliated(&mut rng, 2, k, 8, &omega, TupleShape::Abelian);
    write(&dir, "equiv_a.toml", &g2, k, Some(&omega), Invariant::Bifoliated(a.clone()));
    // s = -1 keeps the form since s^k = 1
    let psi = JetDiffeo::from_ints(8, &[-1, 1, 0, 2, -1]).unwrap();
    let b = a.conjugate_by(&psi);
    write(&dir, "equiv_b_conjugate.toml", &g2, k, None, Invariant::Bifoliated(b.clone()));
    let psi = JetDiffeo::from_ints(8, &[2, 0, 1]).unwrap();
    let scaled = a.conjugate_by(&psi);
    write(&dir, "equiv_b_scaled.toml", &g2, k, None, Invariant::Bifoliated(scaled));
    let mut entries = b.rho_g().entries().to_vec();
    entries[1] = with_coeff(&entries[1], 7, &entries[1].coeff(7) + &Scalar::one());
    let fault = BifoliatedInvariant::new(2, b.rho_f().clone(), DiffeoTuple::new(entries).unwrap(), b.transports().clone())
        .unwrap();
    write(&dir, "equiv_b_fault.toml", &g2, k, None, Invariant::Bifoliated(fault));
    // doubling every leading coefficient forces s^2 = 1/2
    let double = |t: &DiffeoTuple| {
        DiffeoTuple::new(
            t.entries()
                .iter()
                .map(|f| with_coeff(f, k + 1, f.coeff(k + 1).scale_int(2)))
                .collect(),
        )
        .unwrap()
    };
    let doubled = BifoliatedInvariant::new(2, double(a.rho_f()), double(a.rho_g()), double(a.transports())).unwrap();
    write(&dir, "equiv_b_doubled.toml", &g2, k, None, Invariant::Bifoliated(doubled));

    let mut f = a.rho_f().entries().to_vec();
    f[0] = JetDiffeo::from_ints(8, &[1, 0, 1]).unwrap();
    f[2] = JetDiffeo::from_ints(8, &[1, 0, 0, 1]).unwrap();
    let broken = BifoliatedInvariant::new(2, DiffeoTuple::new(f).unwrap(), a.rho_g().clone(), a.transports().clone())
        .unwrap();
    write(&dir, "broken_relation_g2_k2.toml", &g2, k, Some(&omega), Invariant::Bifoliated(broken));
}
