//! Statistical helpers: Pearson correlation with two-sided p-values via the
//! regularized incomplete beta function, Spearman rank correlation, the
//! adjusted Rand index, and mean/std summaries.

/// `ln Γ(z)` for `z > 0` by the Lanczos approximation.
pub fn ln_gamma(z: f64) -> f64 {
    assert!(z > 0.0, "ln_gamma requires z > 0");
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut sum = 1.000000000190015;
    for (i, &c) in COEFFS.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Regularized incomplete beta function `I_x(a, b)` by the Lentz continued
/// fraction, with the symmetry relation for fast convergence.
pub fn regularized_inc_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - regularized_inc_beta(1.0 - x, b, a);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    let front = ln_front.exp();

    const TINY: f64 = 1e-30;
    const EPS: f64 = 1e-15;
    let mut f = 1.0;
    let mut c = 1.0;
    let mut d = 0.0;
    let advance = |num: f64, f: &mut f64, c: &mut f64, d: &mut f64| -> f64 {
        *d = 1.0 + num * *d;
        if d.abs() < TINY {
            *d = TINY;
        }
        *d = 1.0 / *d;
        *c = 1.0 + num / *c;
        if c.abs() < TINY {
            *c = TINY;
        }
        let delta = *c * *d;
        *f *= delta;
        delta
    };
    for m in 0..300 {
        let mf = m as f64;
        let odd = -(a + mf) * (a + b + mf) * x / ((a + 2.0 * mf) * (a + 2.0 * mf + 1.0));
        let delta = advance(odd, &mut f, &mut c, &mut d);
        if (delta - 1.0).abs() < EPS {
            break;
        }
        let even = (mf + 1.0) * (b - mf - 1.0) * x / ((a + 2.0 * mf + 1.0) * (a + 2.0 * mf + 2.0));
        let delta = advance(even, &mut f, &mut c, &mut d);
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front / (f * a)
}

/// Two-sided p-value of a t statistic with `dof` degrees of freedom:
/// `p = I_{ν/(ν+t²)}(ν/2, 1/2)`.
pub fn t_two_sided_p(t: f64, dof: f64) -> f64 {
    assert!(dof > 0.0);
    if !t.is_finite() {
        return 0.0;
    }
    regularized_inc_beta(dof / (dof + t * t), dof / 2.0, 0.5)
}

/// Pearson correlation with its two-sided p-value against the null of zero
/// correlation (t distribution with n-2 degrees of freedom).
///
/// Constant columns yield `(r, p) = (0, 1)` by convention; an exact linear
/// relationship yields `p = 0`.
pub fn pearson(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut ss_x = 0.0;
    let mut ss_y = 0.0;
    let mut ss_xy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        ss_x += dx * dx;
        ss_y += dy * dy;
        ss_xy += dx * dy;
    }
    if ss_x == 0.0 || ss_y == 0.0 {
        return (0.0, 1.0);
    }
    let r = (ss_xy / (ss_x * ss_y).sqrt()).clamp(-1.0, 1.0);
    let dof = n - 2.0;
    if dof <= 0.0 {
        return (r, 1.0);
    }
    if 1.0 - r * r < 1e-15 {
        return (r, 0.0);
    }
    let t = r * (dof / (1.0 - r * r)).sqrt();
    (r, t_two_sided_p(t, dof))
}

/// Average ranks (1-based), with ties receiving the mean of their ranks.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut k = i;
        while k + 1 < order.len() && xs[order[k + 1]] == xs[order[i]] {
            k += 1;
        }
        let avg = (i + 1 + k + 1) as f64 / 2.0;
        for &idx in &order[i..=k] {
            ranks[idx] = avg;
        }
        i = k + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
/// Returns 0 when either rank vector is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&average_ranks(x), &average_ranks(y)).0
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Chance-corrected: 1 for identical partitions, near 0 for independent
/// ones. When the correction denominator vanishes (both partitions trivial)
/// the partitions are necessarily identical, giving 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let ka = a.iter().max().map_or(0, |&m| m + 1);
    let kb = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |k: usize| (k * k.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_rows: f64 = table.iter().map(|row| choose2(row.iter().sum())).sum();
    let sum_cols: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum()))
        .sum();
    let total = choose2(n);
    let expected = sum_rows * sum_cols / total;
    let max_index = (sum_rows + sum_cols) / 2.0;
    if (max_index - expected).abs() < 1e-300 {
        return 1.0;
    }
    (sum_cells - expected) / (max_index - expected)
}

/// Mean and sample standard deviation (n-1 denominator; 0 when n < 2).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
