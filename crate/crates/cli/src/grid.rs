//! Grid parsing: `a:b:step` ranges and comma lists.

/// Parse `a:b:step` (inclusive of `b` when `step` divides `b − a`) or `v1,v2,…`.
///
/// The result must be strictly increasing.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(format!("grid range `{s}` must have the form a:b:step"));
        };
        let (lo, hi, h) = (num(a)?, num(b)?, num(step)?);
        if !(h > 0.0) {
            return Err(format!("grid step must be positive, got {h}"));
        }
        if hi < lo {
            return Err(format!("grid end {hi} is below its start {lo}"));
        }
        let count = ((hi - lo) / h + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(format!("grid `{s}` has too many points ({count})"));
        }
        let digits = [a, b, step].iter().map(|t| decimals(t)).max().unwrap_or(0);
        let scale = 10f64.powi(digits.min(15) as i32);
        (0..count)
            .map(|k| {
                let v = lo + h * k as f64;
                (v * scale).round() / scale
            })
            .collect()
    } else {
        s.split(',').map(|t| num(t.trim())).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(w) = values.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(format!("grid must be strictly increasing ({} then {})", w[0], w[1]));
    }
    Ok(values)
}

fn num(t: &str) -> Result<f64, String> {
    let v: f64 = t.parse().map_err(|_| format!("`{t}` is not a number"))?;
    if v.is_nan() {
        return Err("NaN in grid".into());
    }
    Ok(v)
}

/// Digits after the decimal point in a plain decimal literal.
fn decimals(t: &str) -> usize {
    if t.contains(['e', 'E']) {
        return 15;
    }
    t.split_once('.').map(|(_, f)| f.len()).unwrap_or(0)
}

/// Parse a comma list of indices.
pub fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    let out = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not an index")))
        .collect::<Result<Vec<_>, _>>()?;
    if out.windows(2).any(|w| w[1] <= w[0]) {
        return Err("indices must be strictly increasing".into());
    }
    Ok(out)
}
