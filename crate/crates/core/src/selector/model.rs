//! Text format of a trained selector.
//!
//! ```text
//! mcpisa-selector 1
//! input_space z
//! inputs z1 z2
//! corpus_hash 0123abcd...
//! seed 0
//! folds 5
//! c_grid 0.1 1 10 100
//! gamma_grid 0.01 0.1 1
//! mean <d values>
//! std <d values>
//! solvers 2
//! solver exact svm <C> <gamma> <bias> <support count>
//! <coef> <x_1> ... <x_d>            (one line per support vector)
//! solver greedy prior <rate>
//! ```
//!
//! Reals use 17 significant digits, so a written model reads back bit for bit.

use std::io::{BufRead, Write};

use super::{Classifier, InputSpace, SelectorError, SelectorModel, Standardizer, Svm, TrainingMeta};
use crate::isa::fmt17;

const MAGIC: &str = "mcpisa-selector";
const VERSION: u32 = 1;

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(" ")
}

fn field<'a>(it: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<Vec<String>, SelectorError> {
    let l = it.next().ok_or_else(|| SelectorError::Model(format!("missing {key} line")))?;
    let mut parts = l.split_whitespace();
    if parts.next() != Some(key) {
        return Err(SelectorError::Model(format!("expected {key}, got {l:?}")));
    }
    Ok(parts.map(str::to_string).collect())
}

impl SelectorModel {
    pub fn write<W: Write>(&self, mut out: W, stamp: &str) -> std::io::Result<()> {
        let mut s = String::new();
        let mut line = |l: String| {
            s.push_str(&l);
            s.push('\n');
        };
        if !stamp.is_empty() {
            line(format!("# {stamp}"));
        }
        line(format!("{MAGIC} {VERSION}"));
        line(format!("input_space {}", self.input_space.as_str()));
        line(format!("inputs {}", self.input_names.join(" ")));
        line(format!("corpus_hash {}", self.meta.corpus_hash));
        line(format!("seed {}", self.meta.seed));
        line(format!("folds {}", self.meta.folds));
        line(format!("c_grid {}", join(&self.meta.c_grid)));
        line(format!("gamma_grid {}", join(&self.meta.gamma_grid)));
        line(format!("mean {}", join(&self.standardizer.mean)));
        line(format!("std {}", join(&self.standardizer.std)));
        line(format!("solvers {}", self.solvers.len()));
        for (id, clf) in self.solvers.iter().zip(&self.classifiers) {
            match clf {
                Classifier::Prior { rate } => line(format!("solver {id} prior {}", fmt17(*rate))),
                Classifier::Svm(m) => {
                    line(format!(
                        "solver {id} svm {} {} {} {}",
                        fmt17(m.c),
                        fmt17(m.gamma),
                        fmt17(m.bias),
                        m.support.len()
                    ));
                    for (coef, sv) in &m.support {
                        line(format!("{} {}", fmt17(*coef), join(sv)));
                    }
                }
            }
        }
        out.write_all(s.as_bytes())?;
        out.flush()
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self, SelectorError> {
        let mut lines = Vec::new();
        for line in input.lines() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                lines.push(t.to_string());
            }
        }
        let mut it = lines.iter().map(String::as_str);
        let bad = |msg: String| SelectorError::Model(msg);
        let magic = field(&mut it, MAGIC)?;
        if magic != [VERSION.to_string()] {
            return Err(bad(format!("unsupported version {magic:?}")));
        }
        let reals = |v: Vec<String>| -> Result<Vec<f64>, SelectorError> {
            v.iter().map(|s| s.parse::<f64>().map_err(|_| SelectorError::Model(format!("bad number {s:?}")))).collect()
        };
        let one = |v: Vec<String>, key: &str| -> Result<String, SelectorError> {
            match <[String; 1]>::try_from(v) {
                Ok([s]) => Ok(s),
                Err(_) => Err(SelectorError::Model(format!("{key} takes one value"))),
            }
        };
        let input_space: InputSpace = one(field(&mut it, "input_space")?, "input_space")?.parse()?;
        let input_names = field(&mut it, "inputs")?;
        let corpus_hash = one(field(&mut it, "corpus_hash")?, "corpus_hash")?;
        let seed = one(field(&mut it, "seed")?, "seed")?.parse().map_err(|_| bad("bad seed".into()))?;
        let folds = one(field(&mut it, "folds")?, "folds")?.parse().map_err(|_| bad("bad folds".into()))?;
        let c_grid = reals(field(&mut it, "c_grid")?)?;
        let gamma_grid = reals(field(&mut it, "gamma_grid")?)?;
        let mean = reals(field(&mut it, "mean")?)?;
        let std = reals(field(&mut it, "std")?)?;
        let count: usize =
            one(field(&mut it, "solvers")?, "solvers")?.parse().map_err(|_| bad("bad solver count".into()))?;
        let d = input_names.len();
        if mean.len() != d || std.len() != d {
            return Err(bad("standardizer does not match the inputs".into()));
        }

        let mut solvers = Vec::with_capacity(count);
        let mut classifiers = Vec::with_capacity(count);
        for _ in 0..count {
            let head = field(&mut it, "solver")?;
            let id = head.first().cloned().ok_or_else(|| bad("solver without id".into()))?;
            let clf = match head.get(1).map(String::as_str) {
                Some("prior") if head.len() == 3 => Classifier::Prior { rate: reals(vec![head[2].clone()])?[0] },
                Some("svm") if head.len() == 6 => {
                    let p = reals(head[2..5].to_vec())?;
                    let nsv: usize = head[5].parse().map_err(|_| bad("bad support count".into()))?;
                    let mut support = Vec::with_capacity(nsv);
                    for _ in 0..nsv {
                        let l = it.next().ok_or_else(|| bad("truncated support vectors".into()))?;
                        let v = reals(l.split_whitespace().map(str::to_string).collect())?;
                        if v.len() != d + 1 {
                            return Err(bad(format!("support vector has {} values, expected {}", v.len(), d + 1)));
                        }
                        support.push((v[0], v[1..].to_vec()));
                    }
                    Classifier::Svm(Svm { c: p[0], gamma: p[1], bias: p[2], support })
                }
                _ => return Err(bad(format!("bad solver line {head:?}"))),
            };
            solvers.push(id);
            classifiers.push(clf);
        }
        if it.next().is_some() {
            return Err(bad("trailing content".into()));
        }
        Ok(SelectorModel {
            input_space,
            input_names,
            standardizer: Standardizer { mean, std },
            solvers,
            classifiers,
            meta: TrainingMeta { corpus_hash, seed, c_grid, gamma_grid, folds },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{train, TrainOptions};
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.9).sin() * 3.0, (i as f64).sqrt()]).collect();
        let labels: Vec<Vec<bool>> = x.iter().map(|r| vec![r[0] > 0.0, r[0] <= 0.5, false]).collect();
        let solvers = vec!["b".to_string(), "a".to_string(), "c".to_string()];
        let inputs = vec!["z1".to_string(), "z2".to_string()];
        let (model, _) =
            train(&x, &labels, &solvers, InputSpace::Projected, &inputs, &TrainOptions::default()).unwrap();
        let mut buf = Vec::new();
        model.write(&mut buf, "stamp").unwrap();
        let back = SelectorModel::read(&buf[..]).unwrap();
        assert_eq!(back, model);
        for xi in &x {
            assert_eq!(back.predict(xi).unwrap(), model.predict(xi).unwrap());
        }
        assert!(SelectorModel::read("mcpisa-selector 2\n".as_bytes()).is_err());
    }
}
