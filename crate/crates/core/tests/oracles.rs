//! Computed quantities checked against independent, deliberately naive
//! reimplementations.

use domsplit::cocycle::ExteriorTower;
use domsplit::domination::gap_series;
use domsplit::linalg::Matrix;
use domsplit::sample::{random_windows, SampleSpec};
use domsplit::shadowlab::{binom_bound_check, kalinin_gap};
use domsplit::spectrum::{periodic_exponents, spectrum_report};
use domsplit::{CyclicWord, FiniteRangeCocycle, ShiftSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn positive_pair() -> FiniteRangeCocycle {
    FiniteRangeCocycle::locally_constant(vec![m2(2.0, 1.0, 1.0, 1.0), m2(3.0, 1.0, 2.0, 1.0)], 1.0).unwrap()
}

/// Dense-product singular values straight from nalgebra, no exterior powers
/// and no rescaling.
fn direct_singular_values(c: &FiniteRangeCocycle, w: &domsplit::Word, n: usize) -> Vec<f64> {
    let mut p = Matrix::identity(c.dimension(), c.dimension());
    for i in 0..n as isize {
        p = c.evaluate(w, i).unwrap() * p;
    }
    let mut s: Vec<f64> = p.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn gap_series_matches_direct_svd_on_random_cocycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let full = ShiftSpace::full(2).unwrap();
    for trial in 0..20 {
        let gens: Vec<Matrix> = (0..2)
            .map(|_| Matrix::from_fn(3, 3, |_, _| rng.random_range(-1.5..1.5)))
            .collect();
        if gens.iter().any(|g| g.determinant().abs() < 0.05) {
            continue;
        }
        let c = FiniteRangeCocycle::locally_constant(gens, 1.0).unwrap();
        let tower = ExteriorTower::new(&c).unwrap();
        let w = random_windows(&full, 1, 0, 12, trial).remove(0);
        for k in 1..3 {
            let series = gap_series(&tower, &w, k, 12, 0).unwrap();
            for n in 1..=12 {
                let s = direct_singular_values(&c, &w, n);
                let oracle = s[k] / s[k - 1];
                let got = series.log_ratios[n - 1].exp();
                // a backward-stable SVD resolves σ_{k+1} only to about ε·σ₁
                let oracle_error = 1e-14 * n as f64 * s[0] / s[k - 1];
                assert!(
                    (got - oracle).abs() <= 1e-8 * oracle + oracle_error,
                    "trial {trial} k {k} n {n}: {got} vs {oracle}"
                );
            }
        }
    }
}

/// Exponents from the eigenvalues of the explicit return map, with the
/// accuracy each one can be trusted to: an eigenvalue `α` of `M` is only
/// resolved to about `ε‖M‖`, i.e. `ε‖M‖/|α|` relative.
fn eigen_exponents(c: &FiniteRangeCocycle, p: &CyclicWord) -> Vec<(f64, f64)> {
    let m = c.product_matrix(p, p.period(), 0).unwrap();
    let norm = m.norm();
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let n = p.period() as f64;
    moduli.iter().map(|x| (x.ln() / n, 1e-9 + 1e-13 * norm / x / n)).collect()
}

#[test]
fn periodic_exponents_match_return_map_eigenvalues() {
    let full = ShiftSpace::full(2).unwrap();
    let c = positive_pair();
    for n in 1..=8 {
        for p in full.enumerate_periodic(n, 1_000).unwrap() {
            let got = periodic_exponents(&c, &p).unwrap().exponents;
            let want = eigen_exponents(&c, &p);
            for (g, (w, tol)) in got.iter().zip(&want) {
                assert!((g - w).abs() < *tol, "{p}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn positive_pair_growth_excess_is_small() {
    let full = ShiftSpace::full(2).unwrap();
    let c = positive_pair();
    let lambda = spectrum_report(&c, &full, 10).unwrap().intervals[0].hi;
    let spec = SampleSpec::new(6, 32, 5);
    let rep = kalinin_gap(&c, &full, lambda, 200, &spec).unwrap();

    // brute force over the same windows with a plain dense product, rescaled
    // every step to keep it finite
    let mut oracle = f64::NEG_INFINITY;
    for w in random_windows(&full, spec.random_windows, 0, 200, spec.seed) {
        let mut v = Matrix::identity(2, 2);
        let mut log = 0.0;
        for i in 0..200 {
            v = c.evaluate(&w, i).unwrap() * v;
            let s = v.amax();
            v /= s;
            log += s.ln();
        }
        let norm = v.singular_values().max();
        oracle = oracle.max((log + norm.ln()) / 200.0 - lambda);
    }
    assert!(rep.excess[199] >= oracle - 1e-12);
    assert!(rep.excess[199] <= 0.05, "excess {}", rep.excess[199]);
}

#[test]
fn binomial_scan_matches_direct_evaluation() {
    let b = binom_bound_check(0.1, 60).unwrap();
    let mut best = 0.0f64;
    for n in 1..=60u32 {
        let mut choose = 1.0f64;
        for k in 1..=n {
            choose = choose * f64::from(n - k + 1) / f64::from(k);
            best = best.max(choose * (-0.1 * f64::from(n * k)).exp());
        }
    }
    assert!((b.c_kappa - best).abs() <= 1e-10 * best);
}

#[test]
fn two_diagonal_norms_are_products_of_diagonals() {
    // ‖product‖ = 2^a 3^b exactly along any word with a ones and b twos
    let full = ShiftSpace::full(2).unwrap();
    let c = FiniteRangeCocycle::locally_constant(vec![m2(2.0, 0.0, 0.0, 0.5), m2(3.0, 0.0, 0.0, 1.0 / 3.0)], 1.0)
        .unwrap();
    for w in random_windows(&full, 10, 0, 40, 3) {
        let twos = w.symbols().iter().filter(|&&s| s == 1).count() as f64;
        let ones = 40.0 - twos;
        let log_norm = c.product(&w, 40, 0).unwrap().log_norm().unwrap();
        assert!((log_norm - (ones * 2f64.ln() + twos * 3f64.ln())).abs() < 1e-11);
    }
}
