//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qii_core::collapse::{evolve, evolve_with_reference, CouplingSpec, IntegratorConfig, LindbladBasis, TrajectoryRecord};
use qii_core::densemat::{tensor_product, unitary_propagator, ComplexMatrix, DensityMatrix, SitedSpace};
use qii_core::entropy::{product_of_marginals, rel_ent_to_marginals, relative_entropy};
use qii_core::partitions::{bell_number, enumerate_partitions, Partition};
use qii_core::qii::{compute_qii, Strategy};
use qii_core::states::{basis, ghz, random_hermitian, random_mixed, random_pure, w};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    relative_entropy(rho, sigma).unwrap().value_bits().expect("finite")
}

fn part(s: &str) -> Partition {
    s.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Independent oracle for the W audit: real symmetric Jacobi plus explicit
// index contraction, sharing no code with the library's linear algebra.

fn real_jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).map(|(p, q)| a[p][q] * a[p][q]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                // columns then rows with G = [[c, s], [-s, c]] on (p, q)
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// S(ρ‖σ) for real symmetric matrices via explicit eigendecompositions.
fn oracle_relative_entropy(rho: &[Vec<f64>], sigma: &[Vec<f64>]) -> f64 {
    let n = rho.len();
    let (lr, _) = real_jacobi(rho.to_vec());
    let (ls, vs) = real_jacobi(sigma.to_vec());
    let self_term: f64 = lr.iter().filter(|&&l| l > 1e-12).map(|&l| l * l.log2()).sum();
    let mut cross = 0.0;
    for k in 0..n {
        let weight: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| vs[i][k] * rho[i][j] * vs[j][k]).sum();
        if ls[k] > 1e-12 {
            cross += weight * ls[k].log2();
        } else {
            assert!(weight.abs() < 1e-12, "support violation in oracle");
        }
    }
    self_term - cross
}

fn w3_amplitudes() -> Vec<f64> {
    let mut a = vec![0.0; 8];
    for i in [1, 2, 4] {
        a[i] = 1.0 / 3f64.sqrt();
    }
    a
}

/// Reduced density matrix of a real 3-qubit pure state on `keep`, by summing
/// over the traced bits. Site 0 is the most significant bit.
fn oracle_marginal(psi: &[f64], keep: &[usize]) -> Vec<Vec<f64>> {
    let k = keep.len();
    let traced: Vec<usize> = (0..3).filter(|s| !keep.contains(s)).collect();
    let bit = |idx: usize, site: usize| (idx >> (2 - site)) & 1;
    let mut out = vec![vec![0.0; 1 << k]; 1 << k];
    for a in 0..8 {
        for b in 0..8 {
            if traced.iter().all(|&t| bit(a, t) == bit(b, t)) {
                let ia = keep.iter().fold(0, |acc, &s| acc * 2 + bit(a, s));
                let ib = keep.iter().fold(0, |acc, &s| acc * 2 + bit(b, s));
                out[ia][ib] += psi[a] * psi[b];
            }
        }
    }
    out
}

fn oracle_kron(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (na, nb) = (a.len(), b.len());
    (0..na * nb)
        .map(|i| (0..na * nb).map(|j| a[i / nb][j / nb] * b[i % nb][j % nb]).collect())
        .collect()
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = ghz(3).unwrap();
    let identity_path = compute_qii(&g, Strategy::AllPartitions).unwrap();
    let spectral_path = enumerate_partitions(3)
        .unwrap()
        .map(|p| rel(&g, &product_of_marginals(&g, &p).unwrap().to_native_order()))
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = (identity_path.phi_bits - 2.0).abs() <= 1e-9
        && (spectral_path - 2.0).abs() <= 1e-9
        && identity_path.mip.is_bipartition()
        && elapsed < Duration::from_secs(1);
    check(
        ok,
        format!(
            "Φ(GHZ) identity={:.12} spectral={:.12} mip={} in {:?}",
            identity_path.phi_bits, spectral_path, identity_path.mip, elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let g = ghz(3).unwrap();
    let sigma_bi = product_of_marginals(&g, &part("0|1,2")).unwrap().to_native_order();
    let sigma_tri = product_of_marginals(&g, &part("0|1|2")).unwrap().to_native_order();
    let expected_bi_matrix = ComplexMatrix::from_real_diagonal(&[0.25, 0.0, 0.0, 0.25, 0.25, 0.0, 0.0, 0.25]);
    let expected_tri_matrix = ComplexMatrix::identity(8).scaled_real(0.125);
    let d5 = sigma_bi.matrix().max_abs_diff(&expected_bi_matrix);
    let d6 = sigma_tri.matrix().max_abs_diff(&expected_tri_matrix);
    let s_bi = rel(&g, &sigma_bi);
    let s_tri = rel(&g, &sigma_tri);
    let ok = d5 <= 1e-12 && d6 <= 1e-12 && (s_bi - 2.0).abs() <= 1e-9 && (s_tri - 3.0).abs() <= 1e-9;
    check(
        ok,
        format!("S(A|BC)={s_bi:.12} S(A|B|C)={s_tri:.12} matrix deviations {d5:e}, {d6:e}"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let psi = w3_amplitudes();
    let rho: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| psi[i] * psi[j]).collect()).collect();
    let m0 = oracle_marginal(&psi, &[0]);
    let m12 = oracle_marginal(&psi, &[1, 2]);
    let m1 = oracle_marginal(&psi, &[1]);
    let m2 = oracle_marginal(&psi, &[2]);
    let oracle_bi = oracle_relative_entropy(&rho, &oracle_kron(&m0, &m12));
    let oracle_tri = oracle_relative_entropy(&rho, &oracle_kron(&oracle_kron(&m0, &m1), &m2));

    let wst = w(3).unwrap();
    let lib_bi = rel_ent_to_marginals(&wst, &part("0|1,2")).unwrap();
    let lib_tri = rel_ent_to_marginals(&wst, &part("0|1|2")).unwrap();
    let elapsed = start.elapsed();

    let expected_bi = 2.0 * 3f64.log2() - 4.0 / 3.0;
    let expected_tri = (27.0f64 / 4.0).log2();
    let reported_bi = 2.0 * 1.5f64.log2();
    let ok = (oracle_bi - lib_bi).abs() <= 1e-8
        && (oracle_tri - lib_tri).abs() <= 1e-8
        && (oracle_bi - expected_bi).abs() <= 1e-8
        && (oracle_tri - expected_tri).abs() <= 1e-8
        // the printed values 1.17 and 3.09 are not what the state gives
        && (lib_bi - 1.17).abs() > 0.5
        && (lib_tri - 3.09).abs() > 0.3
        && elapsed < Duration::from_secs(1);
    check(
        ok,
        format!(
            "W A|BC oracle={oracle_bi:.10} identity={lib_bi:.10}; A|B|C oracle={oracle_tri:.10} identity={lib_tri:.10}; \
             reported 2log2(3/2)={reported_bi:.4} and 3.09 not reproduced; {elapsed:?}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();

    // Klein inequality
    let mut klein_worst = f64::INFINITY;
    let mut klein_equal: f64 = 0.0;
    for seed in 0..1000u64 {
        let dim = 2 + (seed % 7) as usize;
        let rho = DensityMatrix::new(
            SitedSpace::new(vec![dim]).unwrap(),
            random_mixed(1, dim, 2 * seed, dim).unwrap().into_matrix(),
        )
        .unwrap();
        let sigma = random_mixed(1, dim, 2 * seed + 1, dim).unwrap();
        klein_worst = klein_worst.min(rel(&rho, &sigma));
        klein_equal = klein_equal.max(rel(&rho, &rho).abs());
    }

    // path equivalence on every partition
    let mut path_dev: f64 = 0.0;
    for seed in 0..100u64 {
        let n = 3 + (seed % 2) as usize;
        let rho = if seed % 4 < 2 {
            random_pure(n, 2, 1000 + seed).unwrap()
        } else {
            random_mixed(n, 2, 1000 + seed, 3).unwrap()
        };
        for p in enumerate_partitions(n).unwrap() {
            let a = rel_ent_to_marginals(&rho, &p).unwrap();
            let b = rel(&rho, &product_of_marginals(&rho, &p).unwrap().to_native_order());
            path_dev = path_dev.max((a - b).abs());
        }
    }

    // site permutation and local unitary invariance
    let mut perm_dev: f64 = 0.0;
    let mut lu_dev: f64 = 0.0;
    for seed in 0..100u64 {
        let n = 3 + (seed % 2) as usize;
        let rho = random_mixed(n, 2, 5000 + seed, 2).unwrap();
        let phi = compute_qii(&rho, Strategy::AllPartitions).unwrap().phi_bits;
        let order: Vec<usize> = (0..n).map(|k| (k + 1 + seed as usize) % n).rev().collect();
        let permuted = rho.permute_sites(&order).unwrap();
        perm_dev = perm_dev.max((compute_qii(&permuted, Strategy::AllPartitions).unwrap().phi_bits - phi).abs());
        let u = (0..n).fold(ComplexMatrix::identity(1), |acc, k| {
            let local = unitary_propagator(&random_hermitian(2, 9000 + 10 * seed + k as u64), 1.0).unwrap();
            tensor_product(&acc, &local).unwrap()
        });
        let rotated = DensityMatrix::new(rho.space().clone(), u.matmul(rho.matrix()).matmul_adjoint(&u)).unwrap();
        lu_dev = lu_dev.max((compute_qii(&rotated, Strategy::AllPartitions).unwrap().phi_bits - phi).abs());
    }

    // products of random single-site states
    let mut product_worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let m = (0..n).fold(ComplexMatrix::identity(1), |acc, k| {
            tensor_product(&acc, random_mixed(1, 2, 7000 + 10 * seed + k as u64, 1 + (k % 2)).unwrap().matrix()).unwrap()
        });
        let rho = DensityMatrix::new(SitedSpace::qubits(n).unwrap(), m).unwrap();
        product_worst = product_worst.max(compute_qii(&rho, Strategy::AllPartitions).unwrap().phi_bits);
    }

    let elapsed = start.elapsed();
    let ok = klein_worst >= -1e-10
        && klein_equal <= 1e-8
        && path_dev <= 1e-8
        && perm_dev <= 1e-9
        && lu_dev <= 1e-9
        && product_worst <= 1e-9
        && elapsed < Duration::from_secs(60);
    check(
        ok,
        format!(
            "Klein min={klein_worst:.3e} S(ρ‖ρ) max={klein_equal:.1e} path dev={path_dev:.3e} perm dev={perm_dev:.3e} LU dev={lu_dev:.3e} \
             product Φ max={product_worst:.3e} in {elapsed:?}"
        ),
    )
}

fn dephasing(dt: f64, t_end: f64, stride: usize, record_stride: usize) -> TrajectoryRecord {
    let mut config = IntegratorConfig::new(dt, t_end);
    config.phi_refresh_stride = stride;
    config.record_stride = record_stride;
    evolve(
        &ghz(3).unwrap(),
        &ComplexMatrix::zeros(8),
        &LindbladBasis::site_projectors(8).unwrap(),
        &CouplingSpec::diagonal_linear(1.0),
        &config,
    )
    .unwrap()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let rec = dephasing(1e-3, 5.0, 10, 1);
    let d = &rec.diagnostics;
    let purity_rise = rec.purity_series.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let phi_rise = rec.phi_series.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    let live = dephasing(1e-3, 5.0, 1, 1);
    let live_rise = live.phi_series.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);

    // Step halving on the held-Φ model: the refresh interval (stride · dt)
    // stays fixed while dt is refined. dt = 1e-2 keeps the errors above
    // round-off; at 1e-3 both runs already agree with the reference to ~1e-16.
    let coarse = dephasing(1e-2, 5.0, 10, usize::MAX).final_state;
    let half = dephasing(5e-3, 5.0, 20, usize::MAX).final_state;
    let reference = dephasing(1.25e-3, 5.0, 80, usize::MAX).final_state;
    let e_coarse = coarse.matrix().max_abs_diff(reference.matrix());
    let e_half = half.matrix().max_abs_diff(reference.matrix());
    let ratio = e_coarse / e_half;

    let ok = d.max_trace_drift <= 1e-8
        && d.max_hermiticity_error <= 1e-10
        && d.min_eigenvalue >= -1e-7
        && purity_rise <= 1e-9
        && phi_rise <= 1e-6
        && live_rise <= 1e-6
        && ratio >= 8.0
        && elapsed < Duration::from_secs(120);
    check(
        ok,
        format!(
            "trace drift={:.2e} herm={:.2e} min eig={:.2e} purity rise={purity_rise:.2e} Φ rise={phi_rise:.2e} (stride 1: {live_rise:.2e}) \
             halving ratio={ratio:.2} ({e_coarse:.2e}/{e_half:.2e}) run {elapsed:?}",
            d.max_trace_drift, d.max_hermiticity_error, d.min_eigenvalue
        ),
    )
}

/// Not a criterion: the same halving study with Φ evaluated at every stage.
fn per_stage_halving_ratio() -> f64 {
    let coarse = dephasing(1e-2, 5.0, 1, usize::MAX).final_state;
    let half = dephasing(5e-3, 5.0, 1, usize::MAX).final_state;
    let reference = dephasing(1.25e-3, 5.0, 1, usize::MAX).final_state;
    coarse.matrix().max_abs_diff(reference.matrix()) / half.matrix().max_abs_diff(reference.matrix())
}

fn criterion_6() -> Outcome {
    let rho0 = random_pure(3, 2, 606).unwrap();
    let h = random_hermitian(8, 607);
    let u = unitary_propagator(&h, 1.0).unwrap();
    let exact = DensityMatrix::new(rho0.space().clone(), u.matmul(rho0.matrix()).matmul_adjoint(&u)).unwrap();
    let config = IntegratorConfig::new(1e-3, 1.0);
    let rec = evolve_with_reference(
        &rho0,
        &h,
        &LindbladBasis::site_projectors(8).unwrap(),
        &CouplingSpec::diagonal_linear(0.0),
        &config,
        Some(&exact),
    )
    .unwrap();
    let f = rec.final_state.fidelity(&exact).unwrap();
    check(f >= 1.0 - 1e-8, format!("fidelity at t=1: 1 - {:.3e}", 1.0 - f))
}

fn criterion_7() -> Outcome {
    let dt = 1e-3;
    let mut config = IntegratorConfig::new(dt, 10.0 * dt);
    config.phi_refresh_stride = 1;
    config.record_stride = 1;
    let zero = ComplexMatrix::zeros(8);
    let basis_ops = LindbladBasis::site_projectors(8).unwrap();
    let coupling = CouplingSpec::diagonal_linear(1.0);
    let run = |rho: &DensityMatrix| evolve(rho, &zero, &basis_ops, &coupling, &config).unwrap();
    let rate = |r: &TrajectoryRecord| (r.coherence_series[10].ln() - r.coherence_series[0].ln()) / (r.times[10] - r.times[0]);

    let g = run(&ghz(3).unwrap());
    let wr = run(&w(3).unwrap());
    let b = run(&basis("000", 2).unwrap());
    let phi_g = compute_qii(&ghz(3).unwrap(), Strategy::AllPartitions).unwrap().phi_bits;
    let phi_w = compute_qii(&w(3).unwrap(), Strategy::AllPartitions).unwrap().phi_bits;
    let expected = phi_g / phi_w;
    let observed = rate(&g) / rate(&wr);
    let rel_err = (observed / expected - 1.0).abs();
    let basis_drift = b
        .coherence_series
        .iter()
        .map(|c| (c - b.coherence_series[0]).abs())
        .fold(0.0, f64::max);
    let ok = rel_err <= 0.05 && basis_drift <= 1e-10;
    check(
        ok,
        format!(
            "rate GHZ={:.6} W={:.6} ratio={observed:.6} expected Φ ratio={expected:.6} (rel err {:.2}%), \
             basis-state coherence drift={basis_drift:.1e}",
            rate(&g),
            rate(&wr),
            100.0 * rel_err
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut counts = Vec::new();
    let mut ok = true;
    for (n, expected) in [(2usize, 1usize), (3, 4), (4, 14), (5, 51)] {
        let listed: Vec<String> = enumerate_partitions(n).unwrap().map(|p| p.to_string()).collect();
        let unique: std::collections::HashSet<&String> = listed.iter().collect();
        ok &= listed.len() == expected && unique.len() == expected && bell_number(n) - 1 == expected as u128;
        counts.push(listed.len());
    }
    check(ok, format!("counts for n=2..5: {counts:?}"))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Φ(GHZ)=2 by both paths", criterion_1),
        ("2 GHZ relative entropies and marginal products", criterion_2),
        ("3 W-state discrepancy audit", criterion_3),
        ("4 entropy and Φ property suite", criterion_4),
        ("5 integrator suite on GHZ dephasing", criterion_5),
        ("6 unitary limit", criterion_6),
        ("7 race signature", criterion_7),
        ("8 partition counts", criterion_8),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let outcome = run();
        if !outcome.pass {
            failures += 1;
        }
        println!("[{}] criterion {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("[INFO] step-halving ratio with Φ evaluated per stage: {:.2}", per_stage_halving_ratio());
    if failures == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
