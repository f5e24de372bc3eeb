//! `features.csv`: `instance_id` followed by the 35 feature columns in
//! canonical order. Lines starting with `#` are comments.

use std::io::{Read, Write};

use super::{Feature, FeatureError, FeatureVector, FEATURE_COUNT};

pub fn write_features_csv<W: Write>(out: W, rows: &[FeatureVector]) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    let table_err = |e: csv::Error| FeatureError::Table(e.to_string());
    let mut header = vec!["instance_id".to_string()];
    header.extend(Feature::ALL.iter().map(|f| f.name().to_string()));
    w.write_record(&header).map_err(table_err)?;
    for row in rows {
        let mut record = vec![row.instance_id.clone()];
        record.extend(row.values().iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(table_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let table_err = |e: csv::Error| FeatureError::Table(e.to_string());
    let header = r.headers().map_err(table_err)?.clone();
    if header.get(0) != Some("instance_id") {
        return Err(FeatureError::Table("first column must be instance_id".into()));
    }
    let mut columns = [usize::MAX; FEATURE_COUNT];
    for (i, name) in header.iter().enumerate().skip(1) {
        let f = Feature::from_name(name).ok_or_else(|| FeatureError::Table(format!("unknown column {name:?}")))?;
        columns[f.index()] = i;
    }
    if let Some(missing) = Feature::ALL.iter().find(|f| columns[f.index()] == usize::MAX) {
        return Err(FeatureError::Table(format!("missing column {}", missing.name())));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(table_err)?;
        let mut values = [0.0; FEATURE_COUNT];
        for f in Feature::ALL {
            let raw = record.get(columns[f.index()]).unwrap_or("");
            values[f.index()] = raw
                .trim()
                .parse()
                .map_err(|_| FeatureError::Table(format!("bad value {raw:?} in column {}", f.name())))?;
        }
        rows.push(FeatureVector::from_values(record.get(0).unwrap_or(""), values));
    }
    Ok(rows)
}
