//! Brute-force reference computations. Nothing here calls into the crate's
//! scoring, subset or statistics code.

#[derive(Debug, Clone, Copy)]
pub struct OracleScore {
    pub g: f64,
    pub v: f64,
    pub xscore: f64,
}

/// Direct transcription of the normalization, mean/variance and xScore
/// formulas on a row-major grid. Variance uses `(Σx² - N·mean²) / (N - 1)`.
pub fn scores(acc: &[Vec<f64>], lambda: f64) -> Vec<OracleScore> {
    let k = acc.len();
    let n = acc[0].len();
    let mut lo = vec![f64::MAX; n];
    let mut hi = vec![f64::MIN; n];
    for row in acc {
        for j in 0..n {
            if row[j] < lo[j] {
                lo[j] = row[j];
            }
            if row[j] > hi[j] {
                hi[j] = row[j];
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    for row in acc {
        let norm: Vec<f64> = (0..n).map(|j| (row[j] - lo[j]) / (hi[j] - lo[j])).collect();
        let s: f64 = norm.iter().sum();
        let s2: f64 = norm.iter().map(|x| x * x).sum();
        let g = s / n as f64;
        let v = ((s2 - n as f64 * g * g) / (n as f64 - 1.0)).max(0.0);
        out.push(OracleScore {
            g,
            v,
            xscore: g - lambda * v,
        });
    }
    out
}

/// Ranks by counting: 1 + #smaller + half the number of other equal values.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let smaller = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64 - 1.0;
            1.0 + smaller + equal / 2.0
        })
        .collect()
}

pub struct OracleFidelity {
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub pairwise_agreement: f64,
    pub score_mae: f64,
}

pub fn fidelity(full: &[f64], sub: &[f64]) -> OracleFidelity {
    let k = full.len();
    let mut c = 0i64;
    let mut d = 0i64;
    for i in 0..k {
        for j in 0..k {
            if i >= j {
                continue;
            }
            let a = full[i] - full[j];
            let b = sub[i] - sub[j];
            if (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0) {
                c += 1;
            } else if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
                d += 1;
            }
        }
    }
    let pairs = (k * (k - 1) / 2) as f64;
    let rf = ranks(full);
    let rs = ranks(sub);
    let d2: f64 = (0..k).map(|i| (rf[i] - rs[i]).powi(2)).sum();
    let kf = k as f64;
    OracleFidelity {
        kendall_tau: (c - d) as f64 / pairs,
        spearman_rho: 1.0 - 6.0 * d2 / (kf * (kf * kf - 1.0)),
        pairwise_agreement: c as f64 / pairs,
        score_mae: (0..k).map(|i| (full[i] - sub[i]).abs()).sum::<f64>() / kf,
    }
}

pub fn fidelity_value(f: &OracleFidelity, objective: &str) -> f64 {
    match objective {
        "kendall_tau" => f.kendall_tau,
        "spearman_rho" => f.spearman_rho,
        "pairwise_agreement" => f.pairwise_agreement,
        "score_mae" => f.score_mae,
        other => panic!("unknown objective {other}"),
    }
}

/// Best k-subset by bitmask enumeration; returns the sorted dataset names
/// and the objective value.
pub fn best_subset(
    acc: &[Vec<f64>],
    names: &[String],
    k: usize,
    lambda: f64,
    objective: &str,
) -> (Vec<String>, f64) {
    let n = names.len();
    let full: Vec<f64> = scores(acc, lambda).iter().map(|s| s.xscore).collect();
    let maximize = objective != "score_mae";
    let mut best: Option<(Vec<String>, f64)> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub_acc: Vec<Vec<f64>> = acc
            .iter()
            .map(|row| cols.iter().map(|&j| row[j]).collect())
            .collect();
        let sub: Vec<f64> = scores(&sub_acc, lambda).iter().map(|s| s.xscore).collect();
        let value = fidelity_value(&fidelity(&full, &sub), objective);
        let mut key: Vec<String> = cols.iter().map(|&j| names[j].clone()).collect();
        key.sort();
        let better = match &best {
            None => true,
            Some((bk, bv)) => {
                let strictly = if maximize { value > *bv } else { value < *bv };
                strictly || (value == *bv && key < *bk)
            }
        };
        if better {
            best = Some((key, value));
        }
    }
    best.unwrap()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}
