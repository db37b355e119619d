use std::fmt;
use std::str::FromStr;

use super::{HeapCurve, RankTable, StatsError, MIN_FIT_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    /// `P(R) = C R^(-exponent)`
    Zipf,
    /// `V(N) = C N^exponent`
    Heap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMethod {
    /// Unweighted ordinary least squares on log-log coordinates.
    #[default]
    LeastSquares,
    /// Discrete power-law likelihood over the fitted rank window.
    MaxLikelihood,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::LeastSquares => "least_squares",
            FitMethod::MaxLikelihood => "max_likelihood",
        }
    }
}

/// Inclusive rank window; an open upper end means "to the last rank".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankRange {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl RankRange {
    pub fn new(lo: u64, hi: Option<u64>) -> Result<Self, StatsError> {
        if lo == 0 || hi.is_some_and(|h| h < lo) {
            return Err(StatsError::InvalidOption(format!(
                "bad rank range {lo}:{}",
                hi.map(|h| h.to_string()).unwrap_or_default()
            )));
        }
        Ok(RankRange { lo, hi })
    }

    pub fn contains(&self, rank: u64) -> bool {
        rank >= self.lo && self.hi.is_none_or(|h| rank <= h)
    }
}

impl fmt::Display for RankRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "{}:{}", self.lo, h),
            None => write!(f, "{}:", self.lo),
        }
    }
}

impl FromStr for RankRange {
    type Err = StatsError;

    /// `LO:HI`, or `LO:` for an open upper end.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StatsError::InvalidOption(format!("rank range `{s}` is not LO:HI or LO:"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi = match hi.trim() {
            "" => None,
            h => Some(h.parse().map_err(|_| bad())?),
        };
        RankRange::new(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Ranks whose count is below this are left out.
    pub min_count: u64,
    pub rank_range: Option<RankRange>,
    pub method: FitMethod,
}

impl FitOptions {
    pub const DEFAULT_MIN_COUNT: u64 = 10;
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            min_count: Self::DEFAULT_MIN_COUNT,
            rank_range: None,
            method: FitMethod::LeastSquares,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub law: Law,
    pub method: FitMethod,
    /// `alpha` for Zipf (reported positive), `beta` for Heaps.
    pub exponent: f64,
    /// Standard error of the exponent.
    pub uncertainty: f64,
    /// Natural-log intercept of the fitted line.
    pub intercept: f64,
    /// Smallest and largest x (rank or sample size) used.
    pub fit_range: (u64, u64),
    pub points: usize,
    pub r_squared: f64,
}

impl FitResult {
    /// The fitted curve evaluated at `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let slope = match self.law {
            Law::Zipf => -self.exponent,
            Law::Heap => self.exponent,
        };
        (self.intercept + slope * x.ln()).exp()
    }
}

impl fmt::Display for FitResult {
    /// Fixed-precision `key = value` report.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let law = match self.law {
            Law::Zipf => "zipf",
            Law::Heap => "heap",
        };
        writeln!(f, "law = {law}")?;
        writeln!(f, "method = {}", self.method.name())?;
        writeln!(f, "exponent = {:.6}", self.exponent)?;
        writeln!(f, "uncertainty = {:.6}", self.uncertainty)?;
        writeln!(f, "intercept = {:.6}", self.intercept)?;
        writeln!(f, "fit_range = {}..{}", self.fit_range.0, self.fit_range.1)?;
        writeln!(f, "points = {}", self.points)?;
        writeln!(f, "r_squared = {:.6}", self.r_squared)
    }
}

impl FromStr for FitResult {
    type Err = StatsError;

    /// Reads the report written by `Display`. Unknown keys are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields = std::collections::HashMap::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| StatsError::FitReport {
                line: i as u64 + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            fields.insert(key.trim(), (i as u64 + 1, value.trim()));
        }
        let get = |key: &str| {
            fields.get(key).copied().ok_or_else(|| StatsError::FitReport {
                line: 0,
                message: format!("missing `{key}`"),
            })
        };
        fn parse<T: FromStr>((line, value): (u64, &str)) -> Result<T, StatsError> {
            value.parse().map_err(|_| StatsError::FitReport {
                line,
                message: format!("bad value `{value}`"),
            })
        }
        let bad = |(line, value): (u64, &str)| StatsError::FitReport {
            line,
            message: format!("bad value `{value}`"),
        };
        let law = match get("law")? {
            (_, "zipf") => Law::Zipf,
            (_, "heap") => Law::Heap,
            other => return Err(bad(other)),
        };
        let method = match get("method")? {
            (_, "least_squares") => FitMethod::LeastSquares,
            (_, "max_likelihood") => FitMethod::MaxLikelihood,
            other => return Err(bad(other)),
        };
        let range = get("fit_range")?;
        let (lo, hi) = range.1.split_once("..").ok_or_else(|| bad(range))?;
        Ok(FitResult {
            law,
            method,
            exponent: parse(get("exponent")?)?,
            uncertainty: parse(get("uncertainty")?)?,
            intercept: parse(get("intercept")?)?,
            fit_range: (parse((range.0, lo))?, parse((range.0, hi))?),
            points: parse(get("points")?)?,
            r_squared: parse(get("r_squared")?)?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct LineFit {
    slope: f64,
    intercept: f64,
    slope_se: f64,
    r_squared: f64,
}

fn r_squared(ys: &[f64], predicted: impl Iterator<Item = f64>) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sst: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ssr: f64 = ys.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    if sst == 0.0 {
        return if ssr == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ssr / sst).clamp(0.0, 1.0)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit, StatsError> {
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(StatsError::InsufficientData {
            points: n,
            required: MIN_FIT_POINTS,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::Degenerate);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = (ssr / (nf - 2.0) / sxx).sqrt();
    let r_squared = r_squared(ys, xs.iter().map(|x| intercept + slope * x));
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
        r_squared,
    })
}

/// `(rank, count)` pairs passing the window and minimum-count filters.
fn zipf_points(table: &RankTable, opts: &FitOptions) -> Vec<(u64, u64)> {
    table
        .entries()
        .iter()
        .filter(|e| e.count >= opts.min_count)
        .filter(|e| opts.rank_range.is_none_or(|r| r.contains(e.rank)))
        .map(|e| (e.rank, e.count))
        .collect()
}

/// Fits `P(R) ∝ R^(-alpha)` to a rank table.
pub fn fit_zipf(table: &RankTable, opts: &FitOptions) -> Result<FitResult, StatsError> {
    let points = zipf_points(table, opts);
    if points.len() < MIN_FIT_POINTS {
        return Err(StatsError::InsufficientData {
            points: points.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let fit_range = (points[0].0, points[points.len() - 1].0);
    let total = table.total_count() as f64;
    match opts.method {
        FitMethod::LeastSquares => {
            let xs: Vec<f64> = points.iter().map(|&(r, _)| (r as f64).ln()).collect();
            let ys: Vec<f64> = points.iter().map(|&(_, c)| (c as f64 / total).ln()).collect();
            let line = least_squares(&xs, &ys)?;
            Ok(FitResult {
                law: Law::Zipf,
                method: FitMethod::LeastSquares,
                exponent: -line.slope,
                uncertainty: line.slope_se,
                intercept: line.intercept,
                fit_range,
                points: points.len(),
                r_squared: line.r_squared,
            })
        }
        FitMethod::MaxLikelihood => zipf_mle(&points, total, fit_range),
    }
}

/// Truncated discrete power law on ranks `lo..=hi`:
/// `p(R) = R^-a / Z(a)`, `Z(a) = sum R^-a`. The score equation
/// `E_a[ln R] = mean observed ln R` is solved by bisection (the left side
/// decreases in `a`); the standard error is `1 / sqrt(n Var_a[ln R])`.
fn zipf_mle(points: &[(u64, u64)], total: f64, fit_range: (u64, u64)) -> Result<FitResult, StatsError> {
    let (lo, hi) = fit_range;
    let logs: Vec<f64> = (lo..=hi).map(|r| (r as f64).ln()).collect();
    let n: f64 = points.iter().map(|&(_, c)| c as f64).sum();
    let target = points.iter().map(|&(r, c)| c as f64 * (r as f64).ln()).sum::<f64>() / n;

    // (ln Z, E[ln R], Var[ln R]) at exponent a, computed stably.
    let moments = |a: f64| {
        let max_term = logs.iter().map(|l| -a * l).fold(f64::NEG_INFINITY, f64::max);
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let w = (-a * l - max_term).exp();
            z += w;
            m1 += w * l;
            m2 += w * l * l;
        }
        let mean = m1 / z;
        (z.ln() + max_term, mean, (m2 / z - mean * mean).max(0.0))
    };

    let (mut a_lo, mut a_hi) = (-10.0f64, 20.0f64);
    if moments(a_lo).1 < target || moments(a_hi).1 > target {
        return Err(StatsError::NoConvergence);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        if moments(mid).1 > target {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    let a = 0.5 * (a_lo + a_hi);
    let (log_z, _, var) = moments(a);
    let intercept = (n / total).ln() - log_z;
    let ys: Vec<f64> = points.iter().map(|&(_, c)| (c as f64 / total).ln()).collect();
    let r2 = r_squared(&ys, points.iter().map(|&(r, _)| intercept - a * (r as f64).ln()));
    Ok(FitResult {
        law: Law::Zipf,
        method: FitMethod::MaxLikelihood,
        exponent: a,
        uncertainty: 1.0 / (n * var).sqrt(),
        intercept,
        fit_range,
        points: points.len(),
        r_squared: r2,
    })
}

/// Fits `V(N) ∝ N^beta` to the mean distinct counts of a Heaps curve.
pub fn fit_heap(curve: &HeapCurve) -> Result<FitResult, StatsError> {
    let points = curve.points();
    let xs: Vec<f64> = points.iter().map(|p| (p.sample_size as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean.ln()).collect();
    let line = least_squares(&xs, &ys)?;
    let fit_range = (
        points.iter().map(|p| p.sample_size).min().unwrap_or(0),
        points.iter().map(|p| p.sample_size).max().unwrap_or(0),
    );
    Ok(FitResult {
        law: Law::Heap,
        method: FitMethod::LeastSquares,
        exponent: line.slope,
        uncertainty: line.slope_se,
        intercept: line.intercept,
        fit_range,
        points: points.len(),
        r_squared: line.r_squared,
    })
}

#[derive(Debug)]
pub struct SensitivityRow {
    pub range: RankRange,
    pub result: Result<FitResult, StatsError>,
}

/// Rank windows tried by default when reporting fit sensitivity.
pub fn default_sensitivity_ranges() -> Vec<RankRange> {
    [
        (1, None),
        (2, None),
        (3, None),
        (5, None),
        (10, None),
        (1, Some(20)),
        (2, Some(20)),
        (3, Some(20)),
        (1, Some(100)),
        (2, Some(100)),
        (1, Some(1000)),
        (2, Some(1000)),
    ]
    .into_iter()
    .map(|(lo, hi)| RankRange { lo, hi })
    .collect()
}

/// Refits over each window with otherwise identical options.
pub fn zipf_sensitivity(table: &RankTable, ranges: &[RankRange], base: &FitOptions) -> Vec<SensitivityRow> {
    ranges
        .iter()
        .map(|&range| SensitivityRow {
            range,
            result: fit_zipf(
                table,
                &FitOptions {
                    rank_range: Some(range),
                    ..*base
                },
            ),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Continent, ContinentSequence};
    use crate::stats::HeapPoint;

    /// Enough distinct sequences for synthetic tables.
    fn nth_sequence(i: usize) -> ContinentSequence {
        let mut counts = [0u32; Continent::COUNT];
        counts[i % Continent::COUNT] = (i / Continent::COUNT) as u32 + 1;
        ContinentSequence::from_counts(counts).unwrap()
    }

    /// Counts proportional to `R^-a`, scaled so the tail stays integral
    /// enough for the min-count filter to be irrelevant.
    fn power_table(a: f64, ranks: usize, scale: f64) -> RankTable {
        RankTable::from_counts(
            (1..=ranks).map(|r| (nth_sequence(r - 1), (scale * (r as f64).powf(-a)).round() as u64)),
        )
        .unwrap()
    }

    #[test]
    fn least_squares_on_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.slope_se < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn least_squares_standard_error_hand_computed() {
        // x = 0,1,2 ; y = 0,2,1 → slope 0.5, intercept 0.5,
        // residuals -0.5, 1, -0.5 → SSR 1.5, se = sqrt(1.5 / 1 / 2).
        let fit = least_squares(&[0.0, 1.0, 2.0], &[0.0, 2.0, 1.0]).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.slope_se - (0.75f64).sqrt()).abs() < 1e-12);
        // SST = 2, r² = 1 - 1.5/2
        assert!((fit.r_squared - 0.25).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let table = power_table(2.0, 2, 1e6);
        assert!(matches!(
            fit_zipf(&table, &FitOptions::default()),
            Err(StatsError::InsufficientData { points: 2, .. })
        ));
        assert!(matches!(least_squares(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::Degenerate)));
    }

    #[test]
    fn noiseless_power_law_exact_frequencies() {
        // Exact frequencies: feed counts through a huge scale so rounding
        // error stays below 1e-6 in the slope.
        let table = power_table(2.0, 100, 1e15);
        let fit = fit_zipf(&table, &FitOptions::default()).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-6, "{}", fit.exponent);
        assert!(fit.uncertainty < 1e-6);
        assert_eq!(fit.fit_range, (1, 100));
        assert!(fit.r_squared > 0.999_999);
    }

    #[test]
    fn range_and_min_count_filters() {
        let table = power_table(1.0, 50, 1000.0);
        let opts = FitOptions {
            min_count: 40,
            ..Default::default()
        };
        let fit = fit_zipf(&table, &opts).unwrap();
        assert_eq!(fit.fit_range, (1, 25));
        let opts = FitOptions {
            min_count: 1,
            rank_range: Some("5:9".parse().unwrap()),
            ..Default::default()
        };
        let fit = fit_zipf(&table, &opts).unwrap();
        assert_eq!((fit.fit_range, fit.points), ((5, 9), 5));
    }

    #[test]
    fn rank_range_parsing() {
        assert_eq!("3:".parse::<RankRange>().unwrap(), RankRange { lo: 3, hi: None });
        assert_eq!("2:20".parse::<RankRange>().unwrap(), RankRange { lo: 2, hi: Some(20) });
        for bad in ["0:5", "5:2", "x:", "7", ":9"] {
            assert!(bad.parse::<RankRange>().is_err(), "{bad}");
        }
        assert_eq!(RankRange { lo: 2, hi: Some(20) }.to_string(), "2:20");
    }

    #[test]
    fn mle_recovers_exponent_from_expected_counts() {
        let table = power_table(1.7, 300, 1e12);
        let fit = fit_zipf(
            &table,
            &FitOptions {
                min_count: 1,
                method: FitMethod::MaxLikelihood,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((fit.exponent - 1.7).abs() < 1e-6, "{}", fit.exponent);
        assert!(fit.uncertainty > 0.0 && fit.uncertainty < 1e-4);
        let p1 = table.by_rank(1).unwrap().frequency;
        assert!((fit.evaluate(1.0) / p1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn heap_noiseless_sqrt() {
        // Perfect squares, so V = N^0.5 is exact in integers.
        let points = [10u64, 20, 40, 100, 200, 400, 1000]
            .iter()
            .map(|&v| HeapPoint::from_samples(v * v, vec![v]))
            .collect();
        let fit = fit_heap(&HeapCurve::from_points(points)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-6, "{}", fit.exponent);
        assert_eq!(fit.fit_range, (100, 1_000_000));
        assert!((fit.evaluate(10_000.0) - 100.0).abs() < 1e-6);
    }

    #[test]
    fn report_format() {
        let fit = FitResult {
            law: Law::Zipf,
            method: FitMethod::LeastSquares,
            exponent: 2.0,
            uncertainty: 0.0,
            intercept: -0.5,
            fit_range: (1, 100),
            points: 100,
            r_squared: 1.0,
        };
        assert_eq!(
            fit.to_string(),
            "law = zipf\nmethod = least_squares\nexponent = 2.000000\nuncertainty = 0.000000\n\
             intercept = -0.500000\nfit_range = 1..100\npoints = 100\nr_squared = 1.000000\n"
        );
        let mut text = fit.to_string();
        text.push_str("seed = 7\n");
        assert_eq!(text.parse::<FitResult>().unwrap(), fit);
    }

    #[test]
    fn report_parse_errors() {
        assert!(matches!(
            "law = zipf\nnonsense\n".parse::<FitResult>(),
            Err(StatsError::FitReport { line: 2, .. })
        ));
        assert!(matches!("law = zipf\n".parse::<FitResult>(), Err(StatsError::FitReport { .. })));
        let bad_law = FitResult {
            law: Law::Heap,
            method: FitMethod::MaxLikelihood,
            exponent: 0.5,
            uncertainty: 0.1,
            intercept: 0.0,
            fit_range: (1, 2),
            points: 3,
            r_squared: 0.9,
        }
        .to_string()
        .replace("heap", "zipfian");
        assert!(bad_law.parse::<FitResult>().is_err());
    }
}
