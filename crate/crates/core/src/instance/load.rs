use super::InstanceError;

/// Granularity of the largest-remainder correction, MW.
pub const LOAD_QUANTUM_MW: f64 = 1e-9;

/// Splits `total_mw` proportionally to `weights`.
///
/// Shares are computed in whole quanta of [`LOAD_QUANTUM_MW`]; quanta lost
/// to flooring go to the largest fractional remainders (ties to the lowest
/// index), so the quanta add up to the rounded total exactly.
pub fn disaggregate_load(total_mw: f64, weights: &[f64]) -> Result<Vec<f64>, InstanceError> {
    if !(total_mw >= 0.0) || !total_mw.is_finite() {
        return Err(InstanceError::Config("total load must be a nonnegative number".into()));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(InstanceError::Config("weights must be nonnegative numbers".into()));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(InstanceError::ZeroWeights);
    }
    let units = (total_mw / LOAD_QUANTUM_MW).round();
    let mut shares: Vec<f64> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(weights.len());
    for (i, w) in weights.iter().enumerate() {
        let exact = units * (w / sum);
        let floor = exact.floor();
        shares.push(floor);
        remainders.push((i, exact - floor));
    }
    let assigned: f64 = shares.iter().sum();
    let missing = (units - assigned).round().max(0.0) as usize;
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(i, _) in remainders.iter().filter(|(i, _)| weights[*i] > 0.0).take(missing) {
        shares[i] += 1.0;
    }
    Ok(shares.into_iter().map(|u| u * LOAD_QUANTUM_MW).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_split() {
        let v = disaggregate_load(100.0, &[1.0, 1.0, 2.0]).unwrap();
        for (a, b) in v.iter().zip([25.0, 25.0, 50.0]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_weight_gets_nothing() {
        let v = disaggregate_load(42.0, &[1.0, 0.0]).unwrap();
        assert!((v[0] - 42.0).abs() < 1e-9);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn all_zero_weights_rejected() {
        assert!(matches!(
            disaggregate_load(10.0, &[0.0, 0.0]),
            Err(InstanceError::ZeroWeights)
        ));
    }

    #[test]
    fn thirds_sum_to_total() {
        let v = disaggregate_load(100.0, &[1.0, 1.0, 1.0]).unwrap();
        assert!((v.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }
}
