use std::str::FromStr;

use sepfront::criterion::linear_grid;

/// Inclusive `start:end:count` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linear_grid(self.start, self.end, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(format!("grid {s:?} is not of the form start:end:count"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad grid bound {t:?}: {e}"))
        };
        let (start, end) = (num(start)?, num(end)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|e| format!("bad grid count {count:?}: {e}"))?;
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if !start.is_finite() || !end.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        if count > 1 && end <= start {
            return Err(format!("grid end {end} must exceed start {start}"));
        }
        Ok(Self { start, end, count })
    }
}

/// Parses a positive `q`, accepting `inf`.
pub fn parse_q(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Inf" | "INF" => Ok(f64::INFINITY),
        t => {
            let q: f64 = t.parse().map_err(|e| format!("bad q {t:?}: {e}"))?;
            if q > 0.0 {
                Ok(q)
            } else {
                Err(format!("q must be positive, got {q}"))
            }
        }
    }
}
