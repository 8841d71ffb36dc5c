//! Semi-random frequency selection, the range measurement matrix, signal
//! synthesis for a target scene, and channel dropping.
//!
//! With `f_m = f0 + B * j_m / N` and `R_n = n * c / (2B)` the matrix entry
//! `exp(-i 4 pi f_m R_n / c)` reduces to `exp(-i 2 pi n (f0/B + j_m/N))`.
//! [`RangeMatrix`] stores that factored form - an N-point twiddle table plus
//! a per-bin carrier phasor - instead of M*N dense entries, so forward and
//! adjoint products cost `O(M*K)` and `O(N * distinct frequencies)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::radar::{RadarParams, TargetScene};
use crate::{Error, Result};

/// `exp(-i 2 pi turns)`, with the turns reduced to [-1/2, 1/2] before the
/// trig call so large integer parts cannot degrade precision.
pub(crate) fn unit_phasor(turns: f64) -> Complex64 {
    let t = turns - turns.round();
    Complex64::from_polar(1.0, -TAU * t)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A semi-random frequency plan: `floor(M/N)` complete ramps of the N-point
/// frequency grid followed by `M mod N` distinct indices drawn uniformly at
/// random from the last ramp, stored ramp-major and ascending within a ramp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyPlan {
    indices: Vec<usize>,
    grid_size: usize,
}

impl FrequencyPlan {
    /// Frequency-grid index of each measurement, length M.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Measurement count M.
    pub fn measurements(&self) -> usize {
        self.indices.len()
    }

    /// Size N of the per-ramp frequency grid.
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Transmitted frequency of measurement `m`: `f0 + B * j_m / N` (Hz).
    pub fn frequency_hz(&self, m: usize, params: &RadarParams) -> f64 {
        params.carrier_hz
            + params.bandwidth_hz * self.indices[m] as f64 / self.grid_size as f64
    }
}

/// Builds the semi-random frequency plan for `m` measurements over an
/// `n`-point grid. The partial-ramp indices are drawn without replacement.
pub fn select_frequencies(m: usize, n: usize, rng: &mut impl Rng) -> FrequencyPlan {
    assert!(m >= 1, "need at least one measurement");
    assert!(n >= 1, "need a non-empty frequency grid");
    let mut indices = Vec::with_capacity(m);
    for _ in 0..m / n {
        indices.extend(0..n);
    }
    let mut extra = rand::seq::index::sample(rng, n, m % n).into_vec();
    extra.sort_unstable();
    indices.extend(extra);
    FrequencyPlan { indices, grid_size: n }
}

/// Inter-antenna steering phase `exp(-i 2 pi f0 d sin(theta) / c)`.
pub fn steering_phase(theta_rad: f64, params: &RadarParams) -> Complex64 {
    unit_phasor(params.carrier_hz * params.spacing_m * theta_rad.sin() / params.wave_speed)
}

/// The range measurement matrix in factored form.
///
/// `entry(m, n) = carrier[n] * twiddle[(n * j_m) mod N]` where
/// `twiddle[k] = exp(-i 2 pi k / N)` and `carrier[n] = exp(-i 2 pi n f0/B)`.
/// The twiddle table is built conjugate-symmetric (`twiddle[N-k]` is the
/// exact conjugate of `twiddle[k]`), and for an integer f0/B the carrier
/// factor is exactly one, so the DFT mirror identity holds to machine
/// precision.
#[derive(Debug, Clone)]
pub struct RangeMatrix {
    indices: Vec<usize>,
    grid_size: usize,
    twiddle: Vec<Complex64>,
    carrier: Vec<Complex64>,
}

impl RangeMatrix {
    pub fn new(plan: &FrequencyPlan, params: &RadarParams) -> Result<Self> {
        if plan.grid_size() != params.bins {
            return Err(Error::DimensionMismatch {
                expected: params.bins,
                got: plan.grid_size(),
            });
        }
        let n = params.bins;
        let mut twiddle = vec![ZERO; n];
        for (k, slot) in twiddle.iter_mut().enumerate().take(n / 2 + 1) {
            *slot = unit_phasor(k as f64 / n as f64);
        }
        for k in n / 2 + 1..n {
            twiddle[k] = twiddle[n - k].conj();
        }
        let ratio = params.carrier_bandwidth_ratio();
        let carrier = (0..n).map(|bin| unit_phasor(bin as f64 * ratio)).collect();
        Ok(Self {
            indices: plan.indices().to_vec(),
            grid_size: n,
            twiddle,
            carrier,
        })
    }

    /// Measurement count M (rows).
    pub fn rows(&self) -> usize {
        self.indices.len()
    }

    /// Range-bin count N (columns).
    pub fn cols(&self) -> usize {
        self.grid_size
    }

    /// Matrix entry `Phi[m][n] = exp(-i 4 pi f_m R_n / c)`.
    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.carrier[n] * self.twiddle[(n * self.indices[m]) % self.grid_size]
    }

    /// Materializes the dense M x N matrix (test and inspection use).
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows())
            .map(|m| (0..self.cols()).map(|n| self.entry(m, n)).collect())
            .collect()
    }

    /// `Phi x`, skipping exactly-zero entries of `x` since scenes are sparse.
    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols(), "forward input length");
        let mut out = vec![ZERO; self.rows()];
        for (bin, &xn) in x.iter().enumerate() {
            if xn == ZERO {
                continue;
            }
            let scaled = xn * self.carrier[bin];
            for (m, &j) in self.indices.iter().enumerate() {
                out[m] += scaled * self.twiddle[(bin * j) % self.grid_size];
            }
        }
        out
    }

    /// Adjoint product `Phi* y`. Measurements are first accumulated per
    /// distinct frequency index (in ascending measurement order), which is
    /// exact for repeated ramps and keeps the cost at N per distinct index.
    pub fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows(), "adjoint input length");
        let n = self.grid_size;
        let mut grouped = vec![ZERO; n];
        for (m, &j) in self.indices.iter().enumerate() {
            grouped[j] += y[m];
        }
        let mut out = vec![ZERO; n];
        for (bin, slot) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, &g) in grouped.iter().enumerate() {
                if g == ZERO {
                    continue;
                }
                acc += g * self.twiddle[(bin * j) % n].conj();
            }
            *slot = acc * self.carrier[bin].conj();
        }
        out
    }
}

/// Synthesizes the raw two-antenna measurements `Gamma = Phi [x, Gx]` for a
/// scene: `(gamma1, gamma2) = (Phi x, Phi G x)`.
pub fn synthesize(
    scene: &TargetScene,
    phi: &RangeMatrix,
    params: &RadarParams,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let (x1, x2) = scene.signal_pair(params);
    (phi.forward(&x1), phi.forward(&x2))
}

/// Channel dropping: keep the I channel of antenna 1 and the Q channel of
/// antenna 2, i.e. `y1 = Re(gamma1)` and `y2 = i Im(gamma2)`.
pub fn drop_channels(
    gamma1: &[Complex64],
    gamma2: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let y1 = gamma1.iter().map(|g| Complex64::new(g.re, 0.0)).collect();
    let y2 = gamma2.iter().map(|g| Complex64::new(0.0, g.im)).collect();
    (y1, y2)
}

/// A frequency plan together with the channel-dropped measurements, keeping
/// the pre-drop samples around for inspection when available.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub plan: FrequencyPlan,
    /// Raw complex samples per antenna, before channel dropping.
    pub gamma: Option<(Vec<Complex64>, Vec<Complex64>)>,
    /// Kept I channel of antenna 1; imaginary parts are exactly zero.
    pub y1: Vec<Complex64>,
    /// Kept Q channel of antenna 2 (times i); real parts are exactly zero.
    pub y2: Vec<Complex64>,
}

impl MeasurementSet {
    pub fn from_gamma(
        plan: FrequencyPlan,
        gamma1: Vec<Complex64>,
        gamma2: Vec<Complex64>,
    ) -> Self {
        let (y1, y2) = drop_channels(&gamma1, &gamma2);
        Self { plan, gamma: Some((gamma1, gamma2)), y1, y2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::Target;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_6;

    fn params() -> RadarParams {
        RadarParams::default()
    }

    fn half_wavelength_params() -> RadarParams {
        let mut p = params();
        p.spacing_m = p.wave_speed / (2.0 * p.carrier_hz);
        p
    }

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn plan_full_ramps_have_no_random_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plan = select_frequencies(512, 256, &mut rng);
        let expected: Vec<usize> = (0..256).chain(0..256).collect();
        assert_eq!(plan.indices(), &expected[..]);

        let plan = select_frequencies(256, 256, &mut rng);
        let expected: Vec<usize> = (0..256).collect();
        assert_eq!(plan.indices(), &expected[..]);
    }

    #[test]
    fn plan_partial_ramp_is_distinct_and_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let plan = select_frequencies(259, 256, &mut rng);
        assert_eq!(plan.measurements(), 259);
        let (ramp, extra) = plan.indices().split_at(256);
        assert_eq!(ramp, (0..256).collect::<Vec<_>>());
        assert_eq!(extra.len(), 3);
        assert!(extra.windows(2).all(|w| w[0] < w[1]), "distinct and ascending");
    }

    #[test]
    fn plan_frequencies_follow_the_grid() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let plan = select_frequencies(256, 256, &mut rng);
        assert_eq!(plan.frequency_hz(0, &p), p.carrier_hz);
        let expected = p.carrier_hz + p.bandwidth_hz * 64.0 / 256.0;
        assert_eq!(plan.frequency_hz(64, &p), expected);
    }

    #[test]
    fn matrix_entries_match_hand_values() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let plan = select_frequencies(256, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        // Column 0 is all ones.
        for m in [0, 17, 200] {
            assert!(approx(phi.entry(m, 0), Complex64::new(1.0, 0.0), 1e-15));
        }
        // j = 64, n = 1: exponent 2 pi (96 + 64/256) == pi/2 mod 2 pi, so -i.
        assert!(approx(phi.entry(64, 1), Complex64::new(0.0, -1.0), 1e-12));
    }

    #[test]
    fn matrix_entries_agree_with_direct_exponential() {
        // Independent route: evaluate exp(-i 4 pi f_m R_n / c) from the
        // physical definition and compare against the factored form.
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plan = select_frequencies(300, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let dr = p.range_resolution();
        for &(m, n) in &[(0usize, 0usize), (7, 3), (260, 255), (128, 128), (299, 41)] {
            let f = plan.frequency_hz(m, &p);
            let turns = 2.0 * f * (n as f64 * dr) / p.wave_speed;
            let direct = unit_phasor(turns);
            assert!(
                approx(phi.entry(m, n), direct, 1e-9),
                "entry ({m},{n}): {} vs {}",
                phi.entry(m, n),
                direct
            );
        }
    }

    #[test]
    fn full_ramp_matrix_is_orthogonal() {
        // (1/N) Phi* Phi = I for one complete ramp with an integer f0/B.
        let mut p = params();
        p.bins = 64;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let plan = select_frequencies(64, 64, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let dense = phi.to_dense();
        for a in 0..64 {
            for b in 0..64 {
                let mut acc = ZERO;
                for row in &dense {
                    acc += row[a].conj() * row[b];
                }
                acc /= 64.0;
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (acc - Complex64::new(expected, 0.0)).norm() < 1e-9,
                    "gram[{a}][{b}] = {acc}"
                );
            }
        }
    }

    #[test]
    fn adjoint_of_real_vectors_is_conjugate_symmetric() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = rng.random_range(64..512);
            let plan = select_frequencies(m, 256, &mut rng);
            let phi = RangeMatrix::new(&plan, &p).unwrap();
            let y: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
                .collect();
            let bp = phi.adjoint(&y);
            for n in 0..256 {
                let mirror = (256 - n) % 256;
                assert!(
                    (bp[mirror] - bp[n].conj()).norm() < 1e-10,
                    "mirror symmetry broke at bin {n}"
                );
            }
        }
    }

    #[test]
    fn full_ramp_preserves_norms() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let plan = select_frequencies(256, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let x: Vec<Complex64> = (0..256)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let gx = phi.forward(&x);
        let lhs: f64 = gx.iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = 256.0 * x.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-6 * rhs);
    }

    #[test]
    fn steering_phase_hand_values() {
        let half = half_wavelength_params();
        assert!(approx(steering_phase(0.0, &half), Complex64::new(1.0, 0.0), 1e-15));
        // theta = pi/6 with half-wavelength spacing: exp(-i pi/2) = -i.
        assert!(approx(
            steering_phase(FRAC_PI_6, &half),
            Complex64::new(0.0, -1.0),
            1e-12
        ));
        assert!(approx(
            steering_phase(-FRAC_PI_6, &half),
            Complex64::new(0.0, 1.0),
            1e-12
        ));
    }

    #[test]
    fn synthesize_single_target_at_zero_angle_copies_a_column() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let plan = select_frequencies(300, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let scene = TargetScene::new(
            &p,
            vec![Target { bin: 40, theta_rad: 0.0, amplitude: Complex64::new(1.0, 0.0) }],
        )
        .unwrap();
        let (g1, g2) = synthesize(&scene, &phi, &p);
        for m in 0..phi.rows() {
            assert!(approx(g1[m], phi.entry(m, 40), 1e-12));
            assert!(approx(g2[m], phi.entry(m, 40), 1e-12), "G = I at theta 0");
        }
    }

    #[test]
    fn synthesize_empty_scene_is_zero() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let plan = select_frequencies(128, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let scene = TargetScene::new(&p, Vec::new()).unwrap();
        let (g1, g2) = synthesize(&scene, &phi, &p);
        assert!(g1.iter().all(|v| *v == ZERO));
        assert!(g2.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn synthesize_is_superposition_of_single_targets() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let plan = select_frequencies(200, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let t1 = Target { bin: 12, theta_rad: 0.4, amplitude: Complex64::from_polar(1.0, 1.1) };
        let t2 = Target { bin: 99, theta_rad: -0.9, amplitude: Complex64::from_polar(1.0, -2.3) };
        let both = TargetScene::new(&p, vec![t1, t2]).unwrap();
        let only1 = TargetScene::new(&p, vec![t1]).unwrap();
        let only2 = TargetScene::new(&p, vec![t2]).unwrap();
        let (a1, a2) = synthesize(&both, &phi, &p);
        let (b1, b2) = synthesize(&only1, &phi, &p);
        let (c1, c2) = synthesize(&only2, &phi, &p);
        for m in 0..phi.rows() {
            assert!(approx(a1[m], b1[m] + c1[m], 1e-10));
            assert!(approx(a2[m], b2[m] + c2[m], 1e-10));
        }
    }

    #[test]
    fn drop_channels_keeps_one_part_per_antenna() {
        let g1 = vec![Complex64::new(1.0, 2.0)];
        let g2 = vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)];
        let (y1, y2) = drop_channels(&g1, &g2);
        assert_eq!(y1[0], Complex64::new(1.0, 0.0));
        assert_eq!(y2[0], Complex64::new(0.0, 2.0));
        assert_eq!(y2[1], Complex64::new(0.0, 0.0), "purely real input drops to zero");
    }

    #[test]
    fn measurement_set_invariants() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let plan = select_frequencies(100, 256, &mut rng);
        let phi = RangeMatrix::new(&plan, &p).unwrap();
        let scene = TargetScene::new(
            &p,
            vec![Target { bin: 7, theta_rad: 0.3, amplitude: Complex64::from_polar(1.0, 0.5) }],
        )
        .unwrap();
        let (g1, g2) = synthesize(&scene, &phi, &p);
        let set = MeasurementSet::from_gamma(plan, g1, g2);
        let (g1, g2) = set.gamma.as_ref().unwrap();
        for m in 0..100 {
            assert_eq!(set.y1[m].im, 0.0);
            assert_eq!(set.y2[m].re, 0.0);
            assert_eq!(set.y1[m].re, g1[m].re);
            assert_eq!(set.y2[m].im, g2[m].im);
        }
    }
}
