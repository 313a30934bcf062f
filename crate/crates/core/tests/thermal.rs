mod common;

use common::{oracle_ampacity, oracle_ols, random_conductor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tep_core::network::ConductorParams;
use tep_core::report::fit_report;
use tep_core::thermal::{
    ampacity, derating_factor, exceedance_trend, fit_trend, project_temperature, read_daily_tmax, top_k_mean_series,
    AnnualSeries, ThermalError, TmaxUnits,
};

#[test]
fn ampacity_matches_transcription_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(738);
    let mut checked = 0;
    let mut rejected = 0;
    while checked < 100 {
        let c = random_conductor(&mut rng);
        let t = rng.gen_range(-20.0..c.max_conductor_temp_c - 0.5);
        match oracle_ampacity(&c, t) {
            Some(expected) => {
                let got = ampacity(&c, t).unwrap();
                assert!(
                    ((got - expected) / expected).abs() <= 1e-9,
                    "{c:?} at {t}: {got} vs {expected}"
                );
                checked += 1;
            }
            None => {
                assert!(matches!(
                    ampacity(&c, t),
                    Err(ThermalError::NonpositiveHeatBalance { .. })
                ));
                rejected += 1;
            }
        }
    }
    assert!(rejected < 100);
}

#[test]
fn drake_defaults_at_40c() {
    let c = ConductorParams::DRAKE;
    let expected = oracle_ampacity(&c, 40.0).unwrap();
    let got = ampacity(&c, 40.0).unwrap();
    assert!(((got - expected) / expected).abs() <= 1e-9);
    assert!(got > ampacity(&c, 50.0).unwrap());
}

#[test]
fn drake_derating_45_to_50() {
    let c = ConductorParams::DRAKE;
    let expected = oracle_ampacity(&c, 50.0).unwrap() / oracle_ampacity(&c, 45.0).unwrap();
    let eta = derating_factor(&c, 45.0, 50.0).unwrap();
    assert!(eta > 0.0 && eta < 1.0);
    assert!(((eta - expected) / expected).abs() <= 1e-9);
}

#[test]
fn derating_is_one_at_equal_temperatures_and_strictly_decreasing() {
    let c = ConductorParams::DRAKE;
    for t in [-5.0, 20.0, 43.3, 60.0] {
        assert_eq!(derating_factor(&c, t, t).unwrap(), 1.0);
    }
    let grid: Vec<f64> = (0..20).map(|i| 30.0 + i as f64 * 1.5).collect();
    let etas: Vec<f64> = grid.iter().map(|&t| derating_factor(&c, 30.0, t).unwrap()).collect();
    for w in etas.windows(2) {
        assert!(w[1] < w[0], "{etas:?}");
    }
}

#[test]
fn derating_rejects_cooling_and_limit_ambient() {
    let c = ConductorParams::DRAKE;
    assert!(matches!(
        derating_factor(&c, 40.0, 35.0),
        Err(ThermalError::FutureBelowBase { .. })
    ));
    assert!(ampacity(&c, c.max_conductor_temp_c - 1e-9).is_err());
}

#[test]
fn collinear_data_recovered_exactly() {
    let points: Vec<(i32, f64)> = (0..30).map(|i| (1990 + i, 0.25 * (1990 + i) as f64 - 400.0)).collect();
    let fit = fit_trend(&AnnualSeries::new(points).unwrap()).unwrap();
    assert!((fit.slope_f_per_year - 0.25).abs() <= 1e-12);
    assert!((fit.intercept_f + 400.0).abs() <= 1e-12 * 400.0);
    assert!((fit.r_squared - 1.0).abs() <= 1e-12);

    let three = AnnualSeries::new(vec![(2000, 100.0), (2010, 101.0), (2020, 102.0)]).unwrap();
    let fit = fit_trend(&three).unwrap();
    assert!((fit.slope_f_per_year - 0.1).abs() <= 1e-12);
    assert!((fit.intercept_f + 100.0).abs() <= 1e-12 * 100.0);
}

#[test]
fn noisy_fit_matches_normal_equations_and_residuals_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut points = Vec::new();
        for y in 1950..2020 {
            if rng.gen_bool(0.9) {
                points.push((y, 100.0 + 0.05 * (y - 1950) as f64 + rng.gen_range(-3.0..3.0)));
            }
        }
        let fit = fit_trend(&AnnualSeries::new(points.clone()).unwrap()).unwrap();
        let (slope, intercept) = oracle_ols(&points);
        assert!((fit.slope_f_per_year - slope).abs() <= 1e-9);
        // The intercept sits 2000 years from the data, so compare fitted values instead.
        let at = |y: f64| slope * y + intercept;
        assert!((fit.predict(1985.0) - at(1985.0)).abs() <= 1e-9);
        let residuals: Vec<f64> = points.iter().map(|p| p.1 - fit.predict(p.0 as f64)).collect();
        let sum: f64 = residuals.iter().sum();
        let x_mean = points.iter().map(|p| p.0 as f64).sum::<f64>() / points.len() as f64;
        let dot: f64 = points
            .iter()
            .zip(&residuals)
            .map(|(p, r)| (p.0 as f64 - x_mean) * r)
            .sum();
        assert!(sum.abs() <= 1e-9 * points.len() as f64, "{sum}");
        assert!(dot.abs() <= 1e-9 * 100.0 * points.len() as f64, "{dot}");
    }
}

#[test]
fn projection_is_slope_times_elapsed_years() {
    let fit = fit_trend(&AnnualSeries::new(vec![(2000, 100.0), (2001, 100.3), (2002, 100.5)]).unwrap()).unwrap();
    for (b, h) in [(1983, 2035), (2020, 2085), (2000, 2000)] {
        assert_eq!(project_temperature(&fit, b, h), fit.slope_f_per_year * (h - b) as f64);
    }
}

#[test]
fn exceedance_fit_uses_points_above_the_line() {
    // Alternating ±1 around 0.1·year; the points above are 2001, 2003 and 2005.
    let points: Vec<(i32, f64)> = (2000..2006)
        .map(|y| (y, 0.1 * y as f64 + if y % 2 == 1 { 1.0 } else { -1.0 }))
        .collect();
    let series = AnnualSeries::new(points.clone()).unwrap();
    let mean = fit_trend(&series).unwrap();
    let ex = exceedance_trend(&series, &mean).unwrap();
    assert_eq!(ex.n_points, 3);
    let above: Vec<(i32, f64)> = points.into_iter().filter(|p| p.0 % 2 == 1).collect();
    let (slope, _) = oracle_ols(&above);
    assert!((ex.slope_f_per_year - slope).abs() <= 1e-9);
}

#[test]
fn top_k_means_by_hand() {
    let d = |day: u32| chrono::NaiveDate::from_ymd_opt(2001, 6, day).unwrap();
    let daily: Vec<_> = (0..11).map(|i| (d(i + 1), 100.0 + i as f64)).collect();
    let top = top_k_mean_series(&daily, 10).unwrap();
    assert_eq!(top.series.points(), &[(2001, 105.5)]);
    let top1 = top_k_mean_series(&daily, 1).unwrap();
    assert_eq!(top1.series.points(), &[(2001, 110.0)]);
    let short = top_k_mean_series(&daily[..5], 10).unwrap();
    assert!(short.series.is_empty());
    assert_eq!(short.skipped, vec![(2001, 5)]);
}

#[test]
fn bundled_temperature_fixture_trend() {
    let file = std::fs::File::open(common::fixture_path("phoenix_like_june_tmax.csv")).unwrap();
    let daily = read_daily_tmax(file, TmaxUnits::Fahrenheit, None).unwrap();
    assert_eq!(daily.missing, 0);
    let top = top_k_mean_series(&daily.records, 3).unwrap();
    assert_eq!(top.series.len(), 70);
    let report = fit_report(&top.series, 1983, &[2035, 2055, 2085]).unwrap();
    assert!((report.mean.slope_f_per_year - 0.05).abs() < 0.01);
    for &(h, m, _) in &report.projections {
        assert_eq!(m, report.mean.slope_f_per_year * (h - 1983) as f64);
    }
}
