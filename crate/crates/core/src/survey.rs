//! Seeded Monte Carlo estimation of entanglement-class frequencies over
//! Bell-diagonal simplices, and 2-D slice scans of named state families.
//!
//! Runs are embarrassingly parallel over samples; the per-sample RNG is
//! derived from (seed, sample index), so serial and parallel executions
//! produce identical results.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{BellBasis, SimplexState};
use crate::criteria::{classify_with, CriteriaChain, EntanglementClass};
use crate::error::{Error, Result};

/// Which Bell basis the survey samples over.
#[derive(Debug, Clone, Serialize)]
pub enum BasisChoice {
    Standard,
    /// Phases drawn uniformly on the unit circle from this seed.
    RandomGeneralized { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SurveyConfig {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub basis: BasisChoice,
    pub chain: CriteriaChain,
}

impl SurveyConfig {
    pub fn new(d: usize, samples: usize, seed: u64) -> Self {
        Self {
            d,
            samples,
            seed,
            basis: BasisChoice::Standard,
            chain: CriteriaChain::survey_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ClassCounts {
    pub npt: usize,
    pub bound_detected: usize,
    pub separable_certified: usize,
    pub ppt_undetermined: usize,
}

impl ClassCounts {
    fn add(&mut self, class: EntanglementClass) {
        match class {
            EntanglementClass::NptEntangled => self.npt += 1,
            EntanglementClass::BoundEntangled => self.bound_detected += 1,
            EntanglementClass::Separable => self.separable_certified += 1,
            EntanglementClass::PptUndetermined => self.ppt_undetermined += 1,
        }
    }

    fn merge(mut self, other: ClassCounts) -> ClassCounts {
        self.npt += other.npt;
        self.bound_detected += other.bound_detected;
        self.separable_certified += other.separable_certified;
        self.ppt_undetermined += other.ppt_undetermined;
        self
    }

    pub fn ppt(&self) -> usize {
        self.bound_detected + self.separable_certified + self.ppt_undetermined
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyResult {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub basis: BasisChoice,
    pub counts: ClassCounts,
    /// Relative frequencies in the order NPT, PPT, bound-detected,
    /// separable-certified, undetermined.
    pub frequencies: Frequencies,
    /// 95% binomial confidence half-widths for the same entries.
    pub ci95: Frequencies,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Frequencies {
    pub npt: f64,
    pub ppt: f64,
    pub bound_detected: f64,
    pub separable_certified: f64,
    pub ppt_undetermined: f64,
}

impl SurveyResult {
    pub fn to_csv(&self) -> String {
        let n = self.samples as f64;
        let rows = [
            ("npt", self.counts.npt, self.frequencies.npt, self.ci95.npt),
            ("ppt", self.counts.ppt(), self.frequencies.ppt, self.ci95.ppt),
            (
                "bound_detected",
                self.counts.bound_detected,
                self.frequencies.bound_detected,
                self.ci95.bound_detected,
            ),
            (
                "separable_certified",
                self.counts.separable_certified,
                self.frequencies.separable_certified,
                self.ci95.separable_certified,
            ),
            (
                "ppt_undetermined",
                self.counts.ppt_undetermined,
                self.frequencies.ppt_undetermined,
                self.ci95.ppt_undetermined,
            ),
        ];
        let mut out = String::from("class,count,frequency,ci95\n");
        for (name, count, freq, ci) in rows {
            out.push_str(&format!("{name},{count},{freq:.6},{ci:.6}\n"));
        }
        let _ = n;
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("survey result serializes")
    }
}

/// Coefficients uniform on the standard (d^2 - 1)-simplex: normalized
/// independent unit exponentials (flat Dirichlet).
pub fn sample_simplex<R: Rng>(d: usize, rng: &mut R) -> SimplexState {
    sample_simplex_in_basis(&BellBasis::standard(d), rng)
}

pub fn sample_simplex_in_basis<R: Rng>(basis: &BellBasis, rng: &mut R) -> SimplexState {
    let d = basis.d();
    let mut c = Array2::zeros((d, d));
    let mut total = 0.0;
    for x in c.iter_mut() {
        let e: f64 = rng.sample(Exp1);
        *x = e;
        total += e;
    }
    c.mapv_inplace(|x| x / total);
    SimplexState::new(basis.clone(), c).expect("normalized nonnegative coefficients")
}

fn classify_sample(
    basis: &BellBasis,
    chain: &CriteriaChain,
    seed: u64,
    index: usize,
) -> Result<EntanglementClass> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let s = sample_simplex_in_basis(basis, &mut rng);
    let dense = s.to_dense();
    Ok(classify_with(&dense, Some(&s), chain)?.class)
}

/// Classify `samples` uniformly drawn Bell-diagonal states and aggregate
/// the class frequencies with binomial confidence intervals.
pub fn run_survey(config: &SurveyConfig) -> Result<SurveyResult> {
    if config.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if config.d < 2 {
        return Err(Error::InvalidParameter("need d >= 2".into()));
    }
    let basis = match &config.basis {
        BasisChoice::Standard => BellBasis::standard(config.d),
        BasisChoice::RandomGeneralized { seed } => {
            BellBasis::random_generalized(config.d, *seed)
        }
    };
    let counts = (0..config.samples)
        .into_par_iter()
        .map(|i| classify_sample(&basis, &config.chain, config.seed, i))
        .try_fold(ClassCounts::default, |mut acc, class| {
            class.map(|c| {
                acc.add(c);
                acc
            })
        })
        .try_reduce(ClassCounts::default, |a, b| Ok(a.merge(b)))?;

    let n = config.samples as f64;
    let freq = |c: usize| c as f64 / n;
    let ci = |c: usize| {
        let p = c as f64 / n;
        1.96 * (p * (1.0 - p) / n).sqrt()
    };
    Ok(SurveyResult {
        d: config.d,
        samples: config.samples,
        seed: config.seed,
        basis: config.basis.clone(),
        counts,
        frequencies: Frequencies {
            npt: freq(counts.npt),
            ppt: freq(counts.ppt()),
            bound_detected: freq(counts.bound_detected),
            separable_certified: freq(counts.separable_certified),
            ppt_undetermined: freq(counts.ppt_undetermined),
        },
        ci95: Frequencies {
            npt: ci(counts.npt),
            ppt: ci(counts.ppt()),
            bound_detected: ci(counts.bound_detected),
            separable_certified: ci(counts.separable_certified),
            ppt_undetermined: ci(counts.ppt_undetermined),
        },
    })
}

/// The parameterized slice families scanned by the figures.
#[derive(Debug, Clone)]
pub enum ScanFamily {
    /// rho_A(x, y) = ((1-x-y)/9) 1 + x P_00 + y P_10.
    ExperimentA,
    /// rho_B(x, y; gamma) with the B-family weights.
    ExperimentB { gamma: f64 },
    /// c = base + x dx + y dy over the declared basis.
    Custom {
        base: Array2<f64>,
        dx: Array2<f64>,
        dy: Array2<f64>,
    },
}

impl ScanFamily {
    fn coefficients(&self, x: f64, y: f64, d: usize) -> Option<Array2<f64>> {
        let c = match self {
            ScanFamily::ExperimentA => {
                let base = (1.0 - x - y) / 9.0;
                let mut c = Array2::from_elem((3, 3), base);
                c[[0, 0]] += x;
                c[[1, 0]] += y;
                c
            }
            ScanFamily::ExperimentB { gamma } => {
                let base = (1.0 - x / 5.0 - y / 4.0 - gamma) / 9.0;
                let mut c = Array2::from_elem((3, 3), base);
                c[[0, 0]] += x / 5.0;
                c[[1, 0]] += y / 8.0;
                c[[2, 0]] += y / 8.0;
                for i in 0..3 {
                    c[[i, 1]] += gamma / 3.0;
                }
                c
            }
            ScanFamily::Custom { base, dx, dy } => {
                base + &dx.mapv(|v| v * x) + &dy.mapv(|v| v * y)
            }
        };
        if c.dim() != (d, d) {
            return None;
        }
        let sum: f64 = c.iter().sum();
        if c.iter().all(|&v| v >= -1e-12) && (sum - 1.0).abs() <= 1e-9 {
            Some(c)
        } else {
            None
        }
    }

    fn d(&self) -> usize {
        match self {
            ScanFamily::ExperimentA | ScanFamily::ExperimentB { .. } => 3,
            ScanFamily::Custom { base, .. } => base.nrows(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

/// Per-grid-point label; points whose coefficients leave the simplex are
/// marked distinctly, mirroring the figures which clip to physical
/// states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanLabel {
    Class(EntanglementClass),
    OutOfSimplex,
}

impl std::fmt::Display for ScanLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanLabel::Class(c) => write!(f, "{c}"),
            ScanLabel::OutOfSimplex => write!(f, "OutOfSimplex"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub x: f64,
    pub y: f64,
    pub label: ScanLabel,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,class\n");
        for p in &self.points {
            out.push_str(&format!("{:.10},{:.10},{}\n", p.x, p.y, p.label));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan result serializes")
    }

    pub fn count(&self, label: ScanLabel) -> usize {
        self.points.iter().filter(|p| p.label == label).count()
    }
}

/// Classify every grid point of a slice family over the given basis.
pub fn slice_scan(
    family: &ScanFamily,
    grid: &GridSpec,
    basis: &BellBasis,
    chain: &CriteriaChain,
) -> Result<ScanResult> {
    if grid.nx < 2 || grid.ny < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2x2 points".into()));
    }
    let d = family.d();
    if basis.d() != d {
        return Err(Error::DimensionMismatch(
            "basis dimension does not match the family".into(),
        ));
    }
    let coords: Vec<(f64, f64)> = (0..grid.nx)
        .flat_map(|ix| {
            let x = grid.x_min + (grid.x_max - grid.x_min) * ix as f64 / (grid.nx - 1) as f64;
            (0..grid.ny).map(move |iy| {
                let y =
                    grid.y_min + (grid.y_max - grid.y_min) * iy as f64 / (grid.ny - 1) as f64;
                (x, y)
            })
        })
        .collect();
    let points = coords
        .into_par_iter()
        .map(|(x, y)| -> Result<ScanPoint> {
            let label = match family.coefficients(x, y, d) {
                None => ScanLabel::OutOfSimplex,
                Some(c) => {
                    let s = SimplexState::new(basis.clone(), c)?;
                    let dense = s.to_dense();
                    ScanLabel::Class(classify_with(&dense, Some(&s), chain)?.class)
                }
            };
            Ok(ScanPoint { x, y, label })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { points })
}

/// Convenience scan of the B1 slice (gamma = -1/sqrt 3).
pub fn scan_experiment_b1(grid: &GridSpec, chain: &CriteriaChain) -> Result<ScanResult> {
    slice_scan(
        &ScanFamily::ExperimentB {
            gamma: -1.0 / 3.0_f64.sqrt(),
        },
        grid,
        &BellBasis::standard(3),
        chain,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sampled_coefficients_are_a_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = sample_simplex(3, &mut rng);
            assert!(s.coeffs().iter().all(|&c| c >= 0.0));
            assert_abs_diff_eq!(s.coeffs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let sa = sample_simplex(3, &mut a);
            let sb = sample_simplex(3, &mut b);
            for (x, y) in sa.coeffs().iter().zip(sb.coeffs().iter()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn per_coordinate_mean_matches_flat_dirichlet() {
        // Flat Dirichlet over K = d^2 coordinates: mean 1/K, variance
        // (K-1)/(K^2 (K+1)).
        let d = 3;
        let k = (d * d) as f64;
        let n = 20_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut mean = 0.0;
        for _ in 0..n {
            let s = sample_simplex(d, &mut rng);
            mean += s.coeffs()[[0, 0]];
        }
        mean /= n as f64;
        let sigma = ((k - 1.0) / (k * k * (k + 1.0)) / n as f64).sqrt();
        assert!(
            (mean - 1.0 / k).abs() < 3.0 * sigma,
            "mean {mean} vs {} +- {sigma}",
            1.0 / k
        );
    }

    #[test]
    fn survey_is_deterministic_and_consistent() {
        let cfg = SurveyConfig::new(3, 500, 7);
        let a = run_survey(&cfg).unwrap();
        let b = run_survey(&cfg).unwrap();
        assert_eq!(a.counts.npt, b.counts.npt);
        assert_eq!(a.counts.bound_detected, b.counts.bound_detected);
        assert_eq!(a.counts.separable_certified, b.counts.separable_certified);

        let total = a.counts.npt + a.counts.ppt();
        assert_eq!(total, 500);
        let fsum = a.frequencies.npt + a.frequencies.ppt;
        assert_abs_diff_eq!(fsum, 1.0, epsilon = 1e-12);
        assert!(a.counts.bound_detected <= a.counts.ppt());
    }

    #[test]
    fn adding_criteria_never_decreases_detection() {
        let mut lean = SurveyConfig::new(3, 400, 13);
        lean.chain = CriteriaChain {
            realignment: true,
            quasi_pure: false,
            reduction: false,
            correlation_scan: false,
            esic: false,
        };
        let mut full = lean.clone();
        full.chain.quasi_pure = true;
        let a = run_survey(&lean).unwrap();
        let b = run_survey(&full).unwrap();
        assert!(b.counts.bound_detected >= a.counts.bound_detected);
        assert_eq!(a.counts.npt, b.counts.npt);
    }

    #[test]
    fn qubit_survey_has_no_detected_bound_entanglement() {
        let cfg = SurveyConfig::new(2, 2_000, 3);
        let r = run_survey(&cfg).unwrap();
        assert_eq!(r.counts.bound_detected, 0);
        // PPT fraction near one half.
        assert!((r.frequencies.ppt - 0.5).abs() < 0.05);
        // For qubits the kernel certificate covers every PPT state.
        assert_eq!(r.counts.ppt_undetermined, 0);
    }

    #[test]
    fn scan_corners_of_family_a() {
        let grid = GridSpec {
            x_min: 0.0,
            x_max: 1.0,
            nx: 2,
            y_min: 0.0,
            y_max: 0.2,
            ny: 2,
        };
        let r = slice_scan(
            &ScanFamily::ExperimentA,
            &grid,
            &BellBasis::standard(3),
            &CriteriaChain::default(),
        )
        .unwrap();
        let find = |x: f64, y: f64| {
            r.points
                .iter()
                .find(|p| (p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12)
                .unwrap()
                .label
        };
        assert_eq!(
            find(1.0, 0.0),
            ScanLabel::Class(EntanglementClass::NptEntangled)
        );
        assert_eq!(
            find(0.0, 0.0),
            ScanLabel::Class(EntanglementClass::Separable)
        );
    }

    #[test]
    fn generalized_basis_changes_the_ppt_region() {
        // Families whose weights are non-uniform only within the shift-0
        // row are locally unitarily equivalent across phase tables, so
        // this slice puts its spikes in shifted rows.
        let uniform = Array2::from_elem((3, 3), 1.0 / 9.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c1 = sample_simplex(3, &mut rng).coeffs().clone();
        let c2 = sample_simplex(3, &mut rng).coeffs().clone();
        let fam = ScanFamily::Custom {
            base: uniform.clone(),
            dx: &c1 - &uniform,
            dy: &c2 - &uniform,
        };
        let grid = GridSpec {
            x_min: 0.0,
            x_max: 1.0,
            nx: 12,
            y_min: 0.0,
            y_max: 1.0,
            ny: 12,
        };
        let chain = CriteriaChain::survey_default();
        let std = slice_scan(&fam, &grid, &BellBasis::standard(3), &chain).unwrap();
        let gen = slice_scan(&fam, &grid, &BellBasis::random_generalized(3, 21), &chain).unwrap();
        // The PPT/NPT pattern over the grid must differ somewhere.
        let is_ppt = |label: &ScanLabel| {
            matches!(
                label,
                ScanLabel::Class(EntanglementClass::BoundEntangled)
                    | ScanLabel::Class(EntanglementClass::Separable)
                    | ScanLabel::Class(EntanglementClass::PptUndetermined)
            )
        };
        let differs = std
            .points
            .iter()
            .zip(gen.points.iter())
            .any(|(a, b)| is_ppt(&a.label) != is_ppt(&b.label));
        assert!(differs, "PPT region identical across bases");
    }
}
