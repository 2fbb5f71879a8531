//! Parameter grids: `v`, `v1,v2,...`, `start:stop:log10` (decades) and
//! `start:stop:step` (linear).

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty value".into());
    }
    if spec.contains(',') {
        return spec.split(',').map(parse_number).collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_number(single)?]),
        [start, stop, step] => {
            let (start, stop) = (parse_number(start)?, parse_number(stop)?);
            if stop < start {
                return Err(format!("grid {spec:?} has stop < start"));
            }
            if step.trim() == "log10" {
                if start <= 0.0 {
                    return Err(format!("log10 grid {spec:?} needs a positive start"));
                }
                let decades = (stop / start).log10();
                let count = (decades + 1e-9).floor() as i32;
                Ok((0..=count).map(|k| start * 10f64.powi(k)).collect())
            } else {
                let step = parse_number(step)?;
                if step <= 0.0 {
                    return Err(format!("grid {spec:?} needs a positive step"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as u64;
                Ok((0..=count).map(|k| start + k as f64 * step).collect())
            }
        }
        _ => Err(format!("cannot parse grid {spec:?}; expected v, v1,v2,..., a:b:log10 or a:b:step")),
    }
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// A non-negative integer, also written as e.g. `1e4`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let v = parse_number(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > 9.0e15 {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    Ok(v as u64)
}

pub fn parse_count_grid(spec: &str) -> Result<Vec<u64>, String> {
    parse_grid(spec)?
        .into_iter()
        .map(|v| {
            let r = v.round();
            if v < 0.0 || (v - r).abs() > 1e-6 * r.max(1.0) {
                Err(format!("{v} is not a non-negative integer"))
            } else {
                Ok(r as u64)
            }
        })
        .collect()
}
