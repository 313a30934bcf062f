//! Conductor ampacity under the steady-state heat balance, temperature-driven
//! derating factors, and peak-temperature trend regressions.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::ConductorParams;

/// Stefan–Boltzmann constant, W/m²·K⁴ (CODATA 2018).
pub const STEFAN_BOLTZMANN: f64 = 5.670374419e-8;

const KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Error, PartialEq)]
pub enum ThermalError {
    #[error("ambient {t_amb_c} °C is not below the conductor limit {t_cond_c} °C")]
    AmbientAtOrAboveLimit { t_amb_c: f64, t_cond_c: f64 },
    #[error(
        "no ampacity at ambient {t_amb_c} °C: convection {convection:.4} W/m + radiation {radiation:.4} W/m \
         does not exceed solar gain {solar:.4} W/m"
    )]
    NonpositiveHeatBalance {
        t_amb_c: f64,
        convection: f64,
        radiation: f64,
        solar: f64,
    },
    #[error("future temperature {t_future_c} °C is below base temperature {t_base_c} °C")]
    FutureBelowBase { t_base_c: f64, t_future_c: f64 },
    #[error("no temperature records")]
    EmptyInput,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("trend fit needs at least 2 distinct years, got {0}")]
    SingularDesign(usize),
    #[error("only {0} points lie above the mean trend line, need at least 2")]
    TooFewExceedances(usize),
    #[error("annual series years must be strictly increasing (year {0})")]
    UnorderedYears(i32),
    #[error("temperature csv: {0}")]
    Csv(String),
}

#[inline]
pub fn f_to_c(f: f64) -> f64 {
    (f - 32.0) * 5.0 / 9.0
}

#[inline]
pub fn c_to_f(c: f64) -> f64 {
    c * 9.0 / 5.0 + 32.0
}

/// The three heat-balance terms per unit length, W/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatBalance {
    pub convection: f64,
    pub radiation: f64,
    pub solar: f64,
}

impl HeatBalance {
    pub fn at(cond: &ConductorParams, t_amb_c: f64) -> Self {
        let d = cond.diameter_m;
        let t_cond = cond.max_conductor_temp_c;
        let tc_k = t_cond + KELVIN_OFFSET;
        let ta_k = t_amb_c + KELVIN_OFFSET;
        HeatBalance {
            convection: std::f64::consts::PI * cond.heat_transfer_coeff * d * (t_cond - t_amb_c),
            radiation: std::f64::consts::PI * cond.emissivity * STEFAN_BOLTZMANN * d * (tc_k.powi(4) - ta_k.powi(4)),
            solar: cond.solar_radiation * d * cond.absorptivity,
        }
    }

    pub fn net(&self) -> f64 {
        self.convection + self.radiation - self.solar
    }
}

/// Steady-state ampacity (A) of a conductor at the given ambient temperature.
///
/// Convection uses the temperature difference; radiation uses absolute
/// temperatures. The resistance is the AC resistance at the conductor limit.
pub fn ampacity(cond: &ConductorParams, t_amb_c: f64) -> Result<f64, ThermalError> {
    if !(t_amb_c < cond.max_conductor_temp_c) {
        return Err(ThermalError::AmbientAtOrAboveLimit {
            t_amb_c,
            t_cond_c: cond.max_conductor_temp_c,
        });
    }
    let hb = HeatBalance::at(cond, t_amb_c);
    let radicand = hb.net() / cond.resistance_ohm_per_m;
    if !(radicand > 0.0) {
        return Err(ThermalError::NonpositiveHeatBalance {
            t_amb_c,
            convection: hb.convection,
            radiation: hb.radiation,
            solar: hb.solar,
        });
    }
    Ok(radicand.sqrt())
}

/// Ratio of ampacity at `t_future_c` to ampacity at `t_base_c`, in (0, 1].
pub fn derating_factor(cond: &ConductorParams, t_base_c: f64, t_future_c: f64) -> Result<f64, ThermalError> {
    if t_future_c < t_base_c {
        return Err(ThermalError::FutureBelowBase { t_base_c, t_future_c });
    }
    let base = ampacity(cond, t_base_c)?;
    if t_future_c == t_base_c {
        return Ok(1.0);
    }
    let future = ampacity(cond, t_future_c)?;
    Ok(future / base)
}

/// Yearly points with strictly increasing years.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnnualSeries {
    points: Vec<(i32, f64)>,
}

impl AnnualSeries {
    pub fn new(points: Vec<(i32, f64)>) -> Result<Self, ThermalError> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ThermalError::UnorderedYears(w[1].0));
            }
        }
        Ok(AnnualSeries { points })
    }

    pub fn points(&self) -> &[(i32, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Result of [`top_k_mean_series`]: the series plus the years skipped for
/// having fewer than `k` records, with their record counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TopKSeries {
    pub series: AnnualSeries,
    pub skipped: Vec<(i32, usize)>,
}

/// Per calendar year, the mean of the `k` largest daily maxima.
pub fn top_k_mean_series(daily: &[(NaiveDate, f64)], k: usize) -> Result<TopKSeries, ThermalError> {
    if k == 0 {
        return Err(ThermalError::ZeroK);
    }
    if daily.is_empty() {
        return Err(ThermalError::EmptyInput);
    }
    let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for (date, t) in daily {
        if t.is_finite() {
            by_year.entry(date.year()).or_default().push(*t);
        }
    }
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (year, mut values) in by_year {
        if values.len() < k {
            skipped.push((year, values.len()));
            continue;
        }
        // Sorting first makes the sum independent of record order.
        values.sort_by(|a, b| b.total_cmp(a));
        let sum: f64 = values[..k].iter().sum();
        points.push((year, sum / k as f64));
    }
    Ok(TopKSeries {
        series: AnnualSeries { points },
        skipped,
    })
}

/// Ordinary least-squares line `value = slope · year + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub slope_f_per_year: f64,
    pub intercept_f: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl TrendFit {
    pub fn predict(&self, year: f64) -> f64 {
        self.slope_f_per_year * year + self.intercept_f
    }
}

fn ols(points: &[(i32, f64)]) -> Result<TrendFit, ThermalError> {
    let n = points.len();
    let distinct = {
        let mut ys: Vec<i32> = points.iter().map(|p| p.0).collect();
        ys.sort_unstable();
        ys.dedup();
        ys.len()
    };
    if distinct < 2 {
        return Err(ThermalError::SingularDesign(distinct));
    }
    let nf = n as f64;
    let x_mean = points.iter().map(|p| p.0 as f64).sum::<f64>() / nf;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let dx = x as f64 - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x as f64 + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(TrendFit {
        slope_f_per_year: slope,
        intercept_f: intercept,
        r_squared,
        n_points: n,
    })
}

pub fn fit_trend(series: &AnnualSeries) -> Result<TrendFit, ThermalError> {
    ols(series.points())
}

/// Points lying strictly above `mean_fit`'s line.
pub fn exceedance_points(series: &AnnualSeries, mean_fit: &TrendFit) -> Vec<(i32, f64)> {
    series
        .points()
        .iter()
        .copied()
        .filter(|&(y, v)| v > mean_fit.predict(y as f64))
        .collect()
}

/// Single-pass refit over the points above the mean trend line.
pub fn exceedance_trend(series: &AnnualSeries, mean_fit: &TrendFit) -> Result<TrendFit, ThermalError> {
    let above = exceedance_points(series, mean_fit);
    if above.len() < 2 {
        return Err(ThermalError::TooFewExceedances(above.len()));
    }
    ols(&above)
}

/// Projected increase in °F between `base_year` and `horizon_year`.
pub fn project_temperature(fit: &TrendFit, base_year: i32, horizon_year: i32) -> f64 {
    fit.slope_f_per_year * f64::from(horizon_year - base_year)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmaxUnits {
    /// GHCN-Daily native units.
    TenthsCelsius,
    Fahrenheit,
}

/// Daily maxima (°F) read from a station CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyRecords {
    pub records: Vec<(NaiveDate, f64)>,
    /// Rows whose TMAX cell was empty or unparsable.
    pub missing: usize,
}

/// Reads `STATION`, `DATE` and `TMAX` columns from a headed CSV. When
/// `station` is given, other stations' rows are ignored.
pub fn read_daily_tmax<R: Read>(
    reader: R,
    units: TmaxUnits,
    station: Option<&str>,
) -> Result<DailyRecords, ThermalError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| ThermalError::Csv(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| ThermalError::Csv(format!("missing column {name}")))
    };
    let (c_station, c_date, c_tmax) = (col("STATION")?, col("DATE")?, col("TMAX")?);

    let mut records = Vec::new();
    let mut missing = 0;
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| ThermalError::Csv(e.to_string()))?;
        if let Some(want) = station {
            if row.get(c_station).map(str::trim) != Some(want) {
                continue;
            }
        }
        let date_s = row.get(c_date).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d")
            .map_err(|e| ThermalError::Csv(format!("row {}: bad DATE {date_s:?}: {e}", i + 2)))?;
        let value = row.get(c_tmax).map(str::trim).unwrap_or("");
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                let f = match units {
                    TmaxUnits::Fahrenheit => v,
                    TmaxUnits::TenthsCelsius => c_to_f(v / 10.0),
                };
                records.push((date, f));
            }
            _ => missing += 1,
        }
    }
    if records.is_empty() {
        return Err(ThermalError::EmptyInput);
    }
    Ok(DailyRecords { records, missing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn ambient_at_limit_is_domain_error() {
        let c = ConductorParams::DRAKE;
        let err = ampacity(&c, c.max_conductor_temp_c - 1e-9).unwrap_err();
        assert!(matches!(err, ThermalError::NonpositiveHeatBalance { .. }));
        assert!(matches!(
            ampacity(&c, c.max_conductor_temp_c),
            Err(ThermalError::AmbientAtOrAboveLimit { .. })
        ));
    }

    #[test]
    fn hotter_ambient_lowers_ampacity() {
        let c = ConductorParams::DRAKE;
        assert!(ampacity(&c, 40.0).unwrap() > ampacity(&c, 50.0).unwrap());
    }

    #[test]
    fn derating_identity_and_order() {
        let c = ConductorParams::DRAKE;
        assert_eq!(derating_factor(&c, 45.0, 45.0).unwrap(), 1.0);
        let eta = derating_factor(&c, 45.0, 50.0).unwrap();
        assert!(eta > 0.0 && eta < 1.0);
        assert!(matches!(
            derating_factor(&c, 50.0, 45.0),
            Err(ThermalError::FutureBelowBase { .. })
        ));
    }

    #[test]
    fn top_ten_mean() {
        let daily: Vec<_> = (0..11).map(|i| (date(2001, 7, 1 + i), 100.0 + i as f64)).collect();
        let out = top_k_mean_series(&daily, 10).unwrap();
        assert_eq!(out.series.points(), &[(2001, 105.5)]);
        assert!(out.skipped.is_empty());
    }

    #[test]
    fn top_one_is_annual_max() {
        let daily = vec![
            (date(2000, 6, 1), 99.0),
            (date(2000, 6, 2), 104.0),
            (date(2001, 6, 1), 101.0),
        ];
        let out = top_k_mean_series(&daily, 1).unwrap();
        assert_eq!(out.series.points(), &[(2000, 104.0), (2001, 101.0)]);
    }

    #[test]
    fn short_year_is_skipped_and_reported() {
        let mut daily: Vec<_> = (0..5).map(|i| (date(1999, 7, 1 + i), 100.0)).collect();
        daily.extend((0..12).map(|i| (date(2000, 7, 1 + i), 101.0)));
        let out = top_k_mean_series(&daily, 10).unwrap();
        assert_eq!(out.series.points(), &[(2000, 101.0)]);
        assert_eq!(out.skipped, vec![(1999, 5)]);
        assert_eq!(top_k_mean_series(&[], 10), Err(ThermalError::EmptyInput));
    }

    #[test]
    fn collinear_fit_is_exact() {
        let s = AnnualSeries::new(vec![(2000, 100.0), (2010, 101.0), (2020, 102.0)]).unwrap();
        let fit = fit_trend(&s).unwrap();
        assert!((fit.slope_f_per_year - 0.1).abs() < 1e-12);
        assert!((fit.intercept_f + 100.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series_fit() {
        let s = AnnualSeries::new((1990..2000).map(|y| (y, 95.0)).collect()).unwrap();
        let fit = fit_trend(&s).unwrap();
        assert_eq!(fit.slope_f_per_year, 0.0);
        assert_eq!(fit.intercept_f, 95.0);
    }

    #[test]
    fn single_year_is_singular() {
        let s = AnnualSeries::new(vec![(2000, 100.0)]).unwrap();
        assert_eq!(fit_trend(&s), Err(ThermalError::SingularDesign(1)));
        assert!(AnnualSeries::new(vec![(2001, 1.0), (2000, 2.0)]).is_err());
    }

    #[test]
    fn exceedance_selects_points_above_line() {
        // Zig-zag about the flat line 100: three points above, three below.
        let s = AnnualSeries::new(vec![
            (2000, 101.0),
            (2001, 99.0),
            (2002, 102.0),
            (2003, 98.0),
            (2004, 101.0),
            (2005, 99.0),
        ])
        .unwrap();
        let mean = TrendFit {
            slope_f_per_year: 0.0,
            intercept_f: 100.0,
            r_squared: 0.0,
            n_points: 6,
        };
        assert_eq!(
            exceedance_points(&s, &mean),
            vec![(2000, 101.0), (2002, 102.0), (2004, 101.0)]
        );
        let fit = exceedance_trend(&s, &mean).unwrap();
        assert_eq!(fit.n_points, 3);
        assert!(fit.slope_f_per_year.abs() < 1e-12);
    }

    #[test]
    fn exceedance_errors_and_full_selection() {
        let s = AnnualSeries::new(vec![(2000, 90.0), (2001, 91.0), (2002, 92.5)]).unwrap();
        let high = TrendFit {
            slope_f_per_year: 0.0,
            intercept_f: 200.0,
            r_squared: 0.0,
            n_points: 3,
        };
        assert_eq!(exceedance_trend(&s, &high), Err(ThermalError::TooFewExceedances(0)));
        let low = TrendFit {
            intercept_f: 0.0,
            ..high
        };
        assert_eq!(exceedance_trend(&s, &low).unwrap(), fit_trend(&s).unwrap());
    }

    #[test]
    fn projection_is_linear_in_years() {
        let fit = TrendFit {
            slope_f_per_year: 0.05,
            intercept_f: 0.0,
            r_squared: 1.0,
            n_points: 2,
        };
        assert!((project_temperature(&fit, 2005, 2035) - 1.5).abs() < 1e-12);
        assert_eq!(project_temperature(&fit, 2005, 2005), 0.0);
    }

    #[test]
    fn reads_ghcn_style_csv() {
        let text = "\"STATION\",\"NAME\",\"DATE\",\"TMAX\"\n\
                    \"USW00023183\",\"PHOENIX\",\"2001-07-01\",\"433\"\n\
                    \"USW00023183\",\"PHOENIX\",\"2001-07-02\",\"\"\n\
                    \"USW00023160\",\"TUCSON\",\"2001-07-01\",\"400\"\n";
        let out = read_daily_tmax(text.as_bytes(), TmaxUnits::TenthsCelsius, Some("USW00023183")).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.missing, 1);
        assert!((out.records[0].1 - c_to_f(43.3)).abs() < 1e-12);
        assert!(read_daily_tmax("DATE,TMAX\n".as_bytes(), TmaxUnits::Fahrenheit, None).is_err());
    }

    proptest! {
        #[test]
        fn fit_is_shift_equivariant(
            values in proptest::collection::vec(80.0f64..120.0, 3..40),
            shift in -50.0f64..50.0,
        ) {
            let pts: Vec<(i32, f64)> = values.iter().enumerate().map(|(i, v)| (1950 + i as i32, *v)).collect();
            let shifted: Vec<(i32, f64)> = pts.iter().map(|&(y, v)| (y, v + shift)).collect();
            let a = fit_trend(&AnnualSeries::new(pts).unwrap()).unwrap();
            let b = fit_trend(&AnnualSeries::new(shifted).unwrap()).unwrap();
            prop_assert!((a.slope_f_per_year - b.slope_f_per_year).abs() < 1e-9);
            prop_assert!((b.intercept_f - a.intercept_f - shift).abs() < 1e-9 * (1.0 + a.intercept_f.abs()));
        }

        #[test]
        fn top_k_ignores_record_order(
            values in proptest::collection::vec(60.0f64..120.0, 12..60),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let daily: Vec<_> = values.iter().enumerate()
                .map(|(i, v)| (date(2000 + (i % 3) as i32, 6, 1 + (i / 3) as u32), *v))
                .collect();
            let mut shuffled = daily.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(top_k_mean_series(&daily, 4).unwrap(), top_k_mean_series(&shuffled, 4).unwrap());
        }

        #[test]
        fn ampacity_decreases_with_ambient(t in 0.0f64..40.0, dt in 0.01f64..5.0) {
            let c = ConductorParams::DRAKE;
            prop_assert!(ampacity(&c, t + dt).unwrap() < ampacity(&c, t).unwrap());
        }
    }
}
