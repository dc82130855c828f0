//! Borehole collars, downhole interval logs, and desurveying into point
//! samples.
//!
//! Tables are comma-delimited UTF-8 with a header row:
//!
//! - collars: `hole_id,x,y,z,total_depth`
//! - categorical intervals: `hole_id,from,to,attribute,code`
//! - assays: `hole_id,from,to,element,value,unit` with `unit` one of `%`, `ppm`
//!
//! Holes are treated as vertical traces below their collar.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Collar {
    pub hole_id: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub total_depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    Percent,
    Ppm,
}

impl Unit {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "%" => Some(Unit::Percent),
            "ppm" => Some(Unit::Ppm),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Unit::Percent => "%",
            Unit::Ppm => "ppm",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleValue {
    Category(String),
    Numeric { value: f64, unit: Unit },
}

impl SampleValue {
    pub fn as_category(&self) -> Option<&str> {
        match self {
            SampleValue::Category(c) => Some(c),
            SampleValue::Numeric { .. } => None,
        }
    }

    pub fn as_numeric(&self) -> Option<(f64, Unit)> {
        match *self {
            SampleValue::Numeric { value, unit } => Some((value, unit)),
            SampleValue::Category(_) => None,
        }
    }
}

/// One downhole interval of one attribute (`lithology`, `Cu`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalLog {
    pub hole_id: String,
    pub from: f64,
    pub to: f64,
    pub attribute: String,
    pub value: SampleValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub attribute: String,
    pub value: SampleValue,
}

impl PointSample {
    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// A named CSV table held in memory.
#[derive(Debug, Clone, Copy)]
pub struct CsvTable<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoreholeSet {
    collars: Vec<Collar>,
    intervals: Vec<IntervalLog>,
}

impl BoreholeSet {
    pub fn collars(&self) -> &[Collar] {
        &self.collars
    }

    pub fn intervals(&self) -> &[IntervalLog] {
        &self.intervals
    }

    pub fn collar(&self, hole_id: &str) -> Option<&Collar> {
        self.collars.iter().find(|c| c.hole_id == hole_id)
    }

    /// Distinct attribute names in sorted order.
    pub fn attributes(&self) -> Vec<String> {
        let mut names: Vec<String> = self.intervals.iter().map(|iv| iv.attribute.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

struct Table<'a> {
    name: &'a str,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl<'a> Table<'a> {
    fn read(table: CsvTable<'a>, required: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(table.text.as_bytes());
        let parse_err = |row: u64, reason: String| Error::Parse { table: table.name.to_string(), row, reason };
        let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
        let columns: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(parse_err(1, format!("missing column `{col}`")));
            }
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let row = e.position().map(|p| p.line()).unwrap_or(0);
                parse_err(row, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(Self { name: table.name, columns, rows })
    }

    fn err(&self, row: u64, reason: impl Into<String>) -> Error {
        Error::Parse { table: self.name.to_string(), row, reason: reason.into() }
    }

    fn field<'r>(&self, record: &'r csv::StringRecord, col: &str) -> &'r str {
        record.get(self.columns[col]).unwrap_or("")
    }

    fn number(&self, row: u64, record: &csv::StringRecord, col: &str) -> Result<f64> {
        let raw = self.field(record, col);
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(row, format!("`{col}` is not a finite number: {raw:?}"))),
        }
    }

    fn text(&self, row: u64, record: &csv::StringRecord, col: &str) -> Result<String> {
        let raw = self.field(record, col);
        if raw.is_empty() {
            return Err(self.err(row, format!("`{col}` is empty")));
        }
        Ok(raw.to_string())
    }
}

/// from, to, table, row
type Span = (f64, f64, String, u64);

/// Parses and validates collar, categorical-interval and assay tables.
///
/// Errors name the table and line: unknown or duplicate hole ids,
/// `from >= to`, intervals past the hole's total depth, overlapping intervals
/// of one attribute in one hole, and non-numeric or negative assays.
pub fn parse_boreholes(collars: CsvTable<'_>, categorical: &[CsvTable<'_>], assays: &[CsvTable<'_>]) -> Result<BoreholeSet> {
    let table = Table::read(collars, &["hole_id", "x", "y", "z", "total_depth"])?;
    let mut set = BoreholeSet::default();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (row, rec) in &table.rows {
        let hole_id = table.text(*row, rec, "hole_id")?;
        let collar = Collar {
            x: table.number(*row, rec, "x")?,
            y: table.number(*row, rec, "y")?,
            z: table.number(*row, rec, "z")?,
            total_depth: table.number(*row, rec, "total_depth")?,
            hole_id: hole_id.clone(),
        };
        if !(collar.total_depth > 0.0) {
            return Err(table.err(*row, format!("total_depth of {hole_id} must be positive")));
        }
        if by_id.insert(hole_id.clone(), set.collars.len()).is_some() {
            return Err(table.err(*row, format!("duplicate hole_id {hole_id}")));
        }
        set.collars.push(collar);
    }

    // (hole, attribute) -> (from, to, table, row) for overlap checks
    let mut spans: BTreeMap<(String, String), Vec<Span>> = BTreeMap::new();

    let mut add_interval = |table: &Table<'_>, row: u64, interval: IntervalLog, set: &mut BoreholeSet| -> Result<()> {
        let Some(&ci) = by_id.get(&interval.hole_id) else {
            return Err(table.err(row, format!("unknown hole_id {}", interval.hole_id)));
        };
        if !(interval.from >= 0.0) {
            return Err(table.err(row, format!("negative `from` ({})", interval.from)));
        }
        if interval.from >= interval.to {
            return Err(table.err(row, format!("`from` ({}) must be less than `to` ({})", interval.from, interval.to)));
        }
        let depth = set.collars[ci].total_depth;
        if interval.to > depth {
            return Err(table.err(
                row,
                format!("`to` ({}) exceeds total_depth ({depth}) of {}", interval.to, interval.hole_id),
            ));
        }
        spans
            .entry((interval.hole_id.clone(), interval.attribute.clone()))
            .or_default()
            .push((interval.from, interval.to, table.name.to_string(), row));
        set.intervals.push(interval);
        Ok(())
    };

    for t in categorical {
        let table = Table::read(*t, &["hole_id", "from", "to", "attribute", "code"])?;
        for (row, rec) in &table.rows {
            let interval = IntervalLog {
                hole_id: table.text(*row, rec, "hole_id")?,
                from: table.number(*row, rec, "from")?,
                to: table.number(*row, rec, "to")?,
                attribute: table.text(*row, rec, "attribute")?,
                value: SampleValue::Category(table.text(*row, rec, "code")?),
            };
            add_interval(&table, *row, interval, &mut set)?;
        }
    }
    for t in assays {
        let table = Table::read(*t, &["hole_id", "from", "to", "element", "value", "unit"])?;
        for (row, rec) in &table.rows {
            let raw_unit = table.field(rec, "unit");
            let unit = Unit::parse(raw_unit)
                .ok_or_else(|| table.err(*row, format!("unit must be `%` or `ppm`, got {raw_unit:?}")))?;
            let raw = table.field(rec, "value");
            let value: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| table.err(*row, format!("non-numeric concentration {raw:?}")))?;
            if value < 0.0 {
                return Err(table.err(*row, format!("negative concentration {value}")));
            }
            let interval = IntervalLog {
                hole_id: table.text(*row, rec, "hole_id")?,
                from: table.number(*row, rec, "from")?,
                to: table.number(*row, rec, "to")?,
                attribute: table.text(*row, rec, "element")?,
                value: SampleValue::Numeric { value, unit },
            };
            add_interval(&table, *row, interval, &mut set)?;
        }
    }

    for ((hole, attribute), mut list) in spans {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in list.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            if next.0 < prev.1 {
                return Err(Error::Parse {
                    table: next.2.clone(),
                    row: next.3,
                    reason: format!(
                        "{attribute} interval {}-{} of {hole} overlaps {}-{} (row {})",
                        next.0, next.1, prev.0, prev.1, prev.3
                    ),
                });
            }
        }
    }

    // a single unit per element keeps the interpolated models in one unit
    let mut units: BTreeMap<&str, Unit> = BTreeMap::new();
    for iv in &set.intervals {
        if let SampleValue::Numeric { unit, .. } = iv.value {
            if let Some(&u) = units.get(iv.attribute.as_str()) {
                if u != unit {
                    return Err(Error::Config(format!("element {} is reported in both {u} and {unit}", iv.attribute)));
                }
            } else {
                units.insert(&iv.attribute, unit);
            }
        }
    }
    Ok(set)
}

/// Splits every interval into segments no longer than `step` starting at the
/// top of the interval, and places one sample at each segment midpoint on the
/// vertical trace below the collar.
///
/// Output is sorted by hole id, attribute and depth, so it does not depend on
/// the order holes were listed in.
pub fn desurvey(set: &BoreholeSet, step: f64) -> Result<Vec<PointSample>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("desurvey step must be positive, got {step}")));
    }
    let mut keyed: Vec<(&str, &str, f64, PointSample)> = Vec::new();
    for iv in &set.intervals {
        let collar = set
            .collar(&iv.hole_id)
            .ok_or_else(|| Error::Config(format!("interval references unknown hole {}", iv.hole_id)))?;
        for (top, bottom) in segments(iv.from, iv.to, step) {
            let mid = 0.5 * (top + bottom);
            keyed.push((
                &iv.hole_id,
                &iv.attribute,
                mid,
                PointSample {
                    x: collar.x,
                    y: collar.y,
                    z: collar.z - mid,
                    attribute: iv.attribute.clone(),
                    value: iv.value.clone(),
                },
            ));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(b.1)).then(a.2.total_cmp(&b.2)));
    Ok(keyed.into_iter().map(|(_, _, _, s)| s).collect())
}

/// Downhole `(top, bottom)` segments covering `[from, to]`.
pub fn segments(from: f64, to: f64, step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut n = 0u32;
    loop {
        let top = from + f64::from(n) * step;
        if top >= to {
            break;
        }
        let bottom = (from + f64::from(n + 1) * step).min(to);
        out.push((top, bottom));
        n += 1;
    }
    out
}

/// Samples of one attribute.
pub fn samples_of<'a>(samples: &'a [PointSample], attribute: &str) -> Vec<&'a PointSample> {
    samples.iter().filter(|s| s.attribute == attribute).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const COLLARS: &str = "hole_id,x,y,z,total_depth\nBH1,100,200,1000,50\n";

    fn table<'a>(name: &'a str, text: &'a str) -> CsvTable<'a> {
        CsvTable { name, text }
    }

    #[test]
    fn one_hole_one_interval() {
        let set = parse_boreholes(
            table("collars", COLLARS),
            &[table("lith", "hole_id,from,to,attribute,code\nBH1,0,10,lithology,andesite\n")],
            &[],
        )
        .unwrap();
        assert_eq!(set.collars().len(), 1);
        assert_eq!(set.intervals().len(), 1);
        assert_eq!(set.intervals()[0].value, SampleValue::Category("andesite".into()));
    }

    fn parse_err(cat: &str, assay: &str) -> (u64, String) {
        let cats = if cat.is_empty() { vec![] } else { vec![table("cat", cat)] };
        let assays = if assay.is_empty() { vec![] } else { vec![table("assay", assay)] };
        match parse_boreholes(table("collars", COLLARS), &cats, &assays) {
            Err(Error::Parse { row, reason, .. }) => (row, reason),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_row_and_reason() {
        let (row, reason) = parse_err("hole_id,from,to,attribute,code\nBH1,0,10,lithology,a\nBH999,0,10,lithology,a\n", "");
        assert_eq!(row, 3);
        assert!(reason.contains("unknown hole_id BH999"), "{reason}");

        let (row, reason) = parse_err("hole_id,from,to,attribute,code\nBH1,10,10,lithology,a\n", "");
        assert_eq!(row, 2);
        assert!(reason.contains("less than"), "{reason}");

        let (row, reason) = parse_err("hole_id,from,to,attribute,code\nBH1,0,10,lithology,a\nBH1,5,20,lithology,b\n", "");
        assert_eq!(row, 3);
        assert!(reason.contains("overlaps"), "{reason}");

        let (_, reason) = parse_err("", "hole_id,from,to,element,value,unit\nBH1,0,10,Cu,abc,%\n");
        assert!(reason.contains("non-numeric"), "{reason}");

        let (_, reason) = parse_err("", "hole_id,from,to,element,value,unit\nBH1,0,10,Cu,1,g/t\n");
        assert!(reason.contains("unit"), "{reason}");

        let (_, reason) = parse_err("hole_id,from,to,attribute,code\nBH1,40,60,lithology,a\n", "");
        assert!(reason.contains("exceeds total_depth"), "{reason}");
    }

    #[test]
    fn different_attributes_may_share_depths() {
        let set = parse_boreholes(
            table("collars", COLLARS),
            &[table("cat", "hole_id,from,to,attribute,code\nBH1,0,10,lithology,a\nBH1,0,10,alteration,potassic\n")],
            &[table("assay", "hole_id,from,to,element,value,unit\nBH1,0,10,Cu,0.5,%\nBH1,0,10,Fe,0,ppm\n")],
        )
        .unwrap();
        assert_eq!(set.attributes(), vec!["Cu", "Fe", "alteration", "lithology"]);
    }

    #[test]
    fn duplicate_collar_rejected() {
        let r = parse_boreholes(table("collars", "hole_id,x,y,z,total_depth\nA,0,0,0,1\nA,1,1,1,1\n"), &[], &[]);
        assert!(matches!(r, Err(Error::Parse { row: 3, .. })));
    }

    fn one_interval(from: f64, to: f64, value: SampleValue) -> BoreholeSet {
        BoreholeSet {
            collars: vec![Collar { hole_id: "BH1".into(), x: 1.0, y: 2.0, z: 1000.0, total_depth: 100.0 }],
            intervals: vec![IntervalLog { hole_id: "BH1".into(), from, to, attribute: "a".into(), value }],
        }
    }

    #[test]
    fn desurvey_single_segment() {
        let s = desurvey(&one_interval(0.0, 10.0, SampleValue::Category("potassic".into())), 10.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].z, 995.0);
        assert_eq!((s[0].x, s[0].y), (1.0, 2.0));
        assert_eq!(s[0].value, SampleValue::Category("potassic".into()));
    }

    #[test]
    fn desurvey_splits_with_remainder() {
        let v = SampleValue::Numeric { value: 0.3, unit: Unit::Percent };
        let s = desurvey(&one_interval(0.0, 25.0, v.clone()), 10.0).unwrap();
        let z: Vec<f64> = s.iter().map(|p| p.z).collect();
        assert_eq!(z, vec![995.0, 985.0, 977.5]);
        assert!(s.iter().all(|p| p.value == v));
        assert!(desurvey(&one_interval(0.0, 25.0, v), 0.0).is_err());
    }

    #[test]
    fn desurvey_order_independent() {
        let collars = "hole_id,x,y,z,total_depth\nA,0,0,10,30\nB,5,5,12,30\n";
        let reversed = "hole_id,x,y,z,total_depth\nB,5,5,12,30\nA,0,0,10,30\n";
        let iv = "hole_id,from,to,attribute,code\nB,0,30,lithology,x\nA,0,12,lithology,y\n";
        let iv_rev = "hole_id,from,to,attribute,code\nA,0,12,lithology,y\nB,0,30,lithology,x\n";
        let a = parse_boreholes(table("c", collars), &[table("i", iv)], &[]).unwrap();
        let b = parse_boreholes(table("c", reversed), &[table("i", iv_rev)], &[]).unwrap();
        assert_eq!(desurvey(&a, 10.0).unwrap(), desurvey(&b, 10.0).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn segment_lengths_sum_to_interval(from_q in 0u32..400, len_q in 1u32..400, step_q in 1u32..80) {
            // quarter-metre depths, as logged
            let from = f64::from(from_q) * 0.25;
            let to = from + f64::from(len_q) * 0.25;
            let step = f64::from(step_q) * 0.25;
            let segs = segments(from, to, step);
            let total: f64 = segs.iter().map(|(a, b)| b - a).sum();
            proptest::prop_assert_eq!(total, to - from);
            proptest::prop_assert!(segs.iter().all(|(a, b)| b - a <= step && b > a));
        }
    }
}
