use std::fs::File;
use std::io::{self, Read};
use std::sync::OnceLock;

use regex::Regex;

use probgems::gems::beatty::{BeattyNumber, QuadIrrational};
use probgems::Error;

fn surd_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\(?(?P<a>-?\d+)?(?P<sign>[+-])?(?:(?P<b>\d+)\*)?sqrt\((?P<d>\d+)\)\)?(?:/(?P<c>\d+))?$")
            .expect("valid pattern")
    })
}

/// `phi`, `sqrt(d)`, `(a+b*sqrt(d))/c` and `a/b` are kept exact; any other
/// number becomes a float with ambiguity detection.
pub fn beatty_number(text: &str) -> Result<BeattyNumber, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "phi" || s == "golden" {
        return Ok(BeattyNumber::Exact(QuadIrrational::golden_ratio()));
    }
    let int = |x: &str| x.parse::<i128>().map_err(|e| format!("{x:?}: {e}"));
    if let Some(m) = surd_pattern().captures(&s) {
        let a = m.name("a").map_or(Ok(0), |x| int(x.as_str()))?;
        let mut b = m.name("b").map_or(Ok(1), |x| int(x.as_str()))?;
        if m.name("sign").map(|x| x.as_str()) == Some("-") {
            b = -b;
        }
        let d = int(&m["d"])?;
        let c = m.name("c").map_or(Ok(1), |x| int(x.as_str()))?;
        return QuadIrrational::new(a, b, d, c).map(BeattyNumber::Exact).map_err(|e| e.to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let q = QuadIrrational::rational(int(num)?, int(den)?).map_err(|e| e.to_string())?;
        return Ok(BeattyNumber::Exact(q));
    }
    s.parse::<f64>().map(BeattyNumber::Float).map_err(|_| format!("cannot read {text:?} as a real number"))
}

fn read_source(path: &str) -> Result<String, Error> {
    let mut text = String::new();
    let res = if path == "-" {
        io::stdin().read_to_string(&mut text)
    } else {
        File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    };
    res.map_err(|e| Error::Domain(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

/// Header-less, comma-separated rows of numbers.
pub fn csv_rows<T: std::str::FromStr>(path: &str) -> Result<Vec<Vec<T>>, Error> {
    let text = read_source(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Domain(format!("{path}: {e}")))?;
        let row = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<T>().map_err(|_| Error::Domain(format!("{path}, row {}: cannot read {f:?}", i + 1))))
            .collect::<Result<Vec<T>, Error>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}
