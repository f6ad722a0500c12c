//! Categorical data ingestion, the global value dictionary, and the
//! frequency statistics every downstream stage consumes.
//!
//! Values are interned per feature into one global id space. Each feature
//! owns a contiguous id range, so feature domains are disjoint by
//! construction and `|V|` is the sum of the domain sizes.

use std::collections::HashMap;
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Column holding the optional outlier/normal tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: None,
            delimiter: b',',
        }
    }
}

/// `N` objects by `D` categorical features, stored row-major as global value
/// ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDataset {
    n_objects: usize,
    feature_names: Vec<String>,
    /// `feature_offsets[f]..feature_offsets[f + 1]` is the id range of feature `f`.
    feature_offsets: Vec<usize>,
    value_names: Vec<String>,
    value_feature: Vec<usize>,
    cells: Vec<u32>,
    labels: Option<Vec<bool>>,
}

/// Parses a binary label. Accepts the usual spellings for both classes.
pub fn parse_label(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "yes" | "y" | "true" | "t" | "outlier" | "anomaly" => Some(true),
        "0" | "no" | "n" | "false" | "f" | "normal" | "inlier" => Some(false),
        _ => None,
    }
}

impl CategoricalDataset {
    /// Interns string rows. Within each feature, ids follow first appearance.
    pub fn from_rows<S: AsRef<str>>(
        feature_names: Vec<String>,
        rows: &[Vec<S>],
        labels: Option<Vec<bool>>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if rows.is_empty() {
            return Err(Error::NoDataRows);
        }
        let mut dictionaries: Vec<HashMap<&str, u32>> = vec![HashMap::new(); d];
        let mut local_names: Vec<Vec<String>> = vec![Vec::new(); d];
        let mut codes = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: d,
                    found: row.len(),
                });
            }
            for (f, cell) in row.iter().enumerate() {
                let s = cell.as_ref();
                let next = dictionaries[f].len() as u32;
                let code = *dictionaries[f].entry(s).or_insert_with(|| {
                    local_names[f].push(s.to_string());
                    next
                });
                codes.push(code);
            }
        }
        Self::from_local_codes(feature_names, local_names, rows.len(), codes, labels)
    }

    /// Builds a dataset from per-feature local codes (`codes[i * D + f]` indexes
    /// `value_names[f]`). Values that never occur are dropped so every value
    /// has positive support.
    pub fn from_local_codes(
        feature_names: Vec<String>,
        value_names: Vec<Vec<String>>,
        n_objects: usize,
        codes: Vec<u32>,
        labels: Option<Vec<bool>>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if n_objects == 0 {
            return Err(Error::NoDataRows);
        }
        if value_names.len() != d || codes.len() != n_objects * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {d} domains and {} cells",
                n_objects * d
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n_objects {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {n_objects} objects",
                    l.len()
                )));
            }
        }
        let mut seen: Vec<Vec<bool>> = value_names.iter().map(|v| vec![false; v.len()]).collect();
        for row in codes.chunks_exact(d.max(1)) {
            for (f, &c) in row.iter().enumerate() {
                let slot = seen[f].get_mut(c as usize).ok_or_else(|| {
                    Error::DimensionMismatch(format!("code {c} outside domain of feature {f}"))
                })?;
                *slot = true;
            }
        }
        let mut feature_offsets = Vec::with_capacity(d + 1);
        let mut names = Vec::new();
        let mut value_feature = Vec::new();
        let mut remap: Vec<Vec<u32>> = Vec::with_capacity(d);
        feature_offsets.push(0);
        for f in 0..d {
            let mut m = vec![u32::MAX; value_names[f].len()];
            for (c, name) in value_names[f].iter().enumerate() {
                if seen[f][c] {
                    m[c] = names.len() as u32;
                    names.push(name.clone());
                    value_feature.push(f);
                }
            }
            remap.push(m);
            feature_offsets.push(names.len());
        }
        let cells = if d == 0 {
            Vec::new()
        } else {
            codes
                .chunks_exact(d)
                .flat_map(|row| row.iter().enumerate().map(|(f, &c)| remap[f][c as usize]).collect::<Vec<_>>())
                .collect()
        };
        Ok(Self {
            n_objects,
            feature_names,
            feature_offsets,
            value_names: names,
            value_feature,
            cells,
            labels,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_values(&self) -> usize {
        self.value_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_name(&self, f: usize) -> &str {
        &self.feature_names[f]
    }

    pub fn value_name(&self, v: usize) -> &str {
        &self.value_names[v]
    }

    pub fn value_names(&self) -> &[String] {
        &self.value_names
    }

    /// Global id of value `name` in feature `f`, if present.
    pub fn value_id(&self, f: usize, name: &str) -> Option<usize> {
        self.feature_domain(f).find(|&v| self.value_names[v] == name)
    }

    pub fn feature_domain(&self, f: usize) -> Range<usize> {
        self.feature_offsets[f]..self.feature_offsets[f + 1]
    }

    pub fn feature_offsets(&self) -> &[usize] {
        &self.feature_offsets
    }

    pub fn feature_of(&self, v: usize) -> usize {
        self.value_feature[v]
    }

    pub fn value_features(&self) -> &[usize] {
        &self.value_feature
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.n_features();
        &self.cells[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        let d = self.n_features().max(1);
        self.cells.chunks_exact(d)
    }

    pub fn cell(&self, i: usize, f: usize) -> usize {
        self.cells[i * self.n_features() + f] as usize
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Option<Vec<bool>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.n_objects {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {} objects",
                    l.len(),
                    self.n_objects
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Per-feature local codes, column-major. Used by the counting kernels.
    pub(crate) fn local_columns(&self) -> Vec<Vec<u32>> {
        let d = self.n_features();
        let mut cols: Vec<Vec<u32>> = (0..d).map(|_| Vec::with_capacity(self.n_objects)).collect();
        // one sequential pass over the row-major cells
        for row in self.rows() {
            for (f, &v) in row.iter().enumerate() {
                cols[f].push(v - self.feature_offsets[f] as u32);
            }
        }
        cols
    }

    /// Keeps only the listed features (in the given order), re-indexing values.
    pub fn select_features(&self, features: &[usize]) -> Result<Self> {
        let d = self.n_features();
        for &f in features {
            if f >= d {
                return Err(Error::InvalidParameter(format!("feature {f} out of range")));
            }
        }
        let names = features.iter().map(|&f| self.feature_names[f].clone()).collect();
        let domains: Vec<Vec<String>> = features
            .iter()
            .map(|&f| self.value_names[self.feature_domain(f)].to_vec())
            .collect();
        let mut codes = Vec::with_capacity(self.n_objects * features.len());
        for row in self.rows() {
            for &f in features {
                codes.push(row[f] - self.feature_offsets[f] as u32);
            }
        }
        Self::from_local_codes(names, domains, self.n_objects, codes, self.labels.clone())
    }

    /// Reorders objects: object `i` of the result is object `order[i]` here.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_objects {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let d = self.n_features();
        let mut cells = Vec::with_capacity(self.cells.len());
        for &i in order {
            cells.extend_from_slice(&self.cells[i * d..(i + 1) * d]);
        }
        let labels = self.labels.as_ref().map(|l| order.iter().map(|&i| l[i]).collect());
        Ok(Self {
            cells,
            labels,
            ..self.clone()
        })
    }
}

/// Reads a categorical CSV file. Every non-label column is a categorical
/// feature; row order is preserved.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<CategoricalDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

pub fn read_csv<R: std::io::Read>(reader: R, options: &CsvOptions) -> Result<CategoricalDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .delimiter(options.delimiter)
        .flexible(true)
        .from_reader(reader);
    let header: Option<Vec<String>> = if options.has_header {
        Some(rdr.headers()?.iter().map(|s| s.to_string()).collect())
    } else {
        None
    };

    let mut records = Vec::new();
    let mut width = header.as_ref().map(|h| h.len());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(records.len() + 1);
        match width {
            Some(w) if rec.len() != w => {
                return Err(Error::RaggedRow {
                    row: line,
                    expected: w,
                    found: rec.len(),
                })
            }
            None => width = Some(rec.len()),
            _ => {}
        }
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(Error::NoDataRows);
    }
    let width = width.unwrap_or(0);
    let label_idx = match &options.label_column {
        None => None,
        Some(LabelColumn::Index(i)) if *i < width => Some(*i),
        Some(LabelColumn::Index(i)) => return Err(Error::UnknownLabelColumn(i.to_string())),
        Some(LabelColumn::Name(name)) => {
            let pos = header.as_ref().and_then(|h| h.iter().position(|c| c == name));
            match pos {
                Some(p) => Some(p),
                None => return Err(Error::UnknownLabelColumn(name.clone())),
            }
        }
    };
    let feature_cols: Vec<usize> = (0..width).filter(|c| Some(*c) != label_idx).collect();
    let feature_names = match &header {
        Some(h) => feature_cols.iter().map(|&c| h[c].clone()).collect(),
        None => feature_cols.iter().map(|&c| format!("F{}", c + 1)).collect(),
    };
    let mut labels = label_idx.map(|_| Vec::with_capacity(records.len()));
    let mut rows = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        if let (Some(li), Some(ls)) = (label_idx, labels.as_mut()) {
            let raw = &rec[li];
            let l = parse_label(raw).ok_or_else(|| Error::InvalidLabel {
                row: *line,
                value: raw.to_string(),
            })?;
            ls.push(l);
        }
        rows.push(feature_cols.iter().map(|&c| &rec[c]).collect::<Vec<&str>>());
    }
    CategoricalDataset::from_rows(feature_names, &rows, labels)
}

/// Drops every single-valued feature (mode frequency 1). Returns the reduced
/// dataset and the names of the removed features.
pub fn preprocess(dataset: CategoricalDataset) -> Result<(CategoricalDataset, Vec<String>)> {
    let keep: Vec<usize> = (0..dataset.n_features())
        .filter(|&f| dataset.feature_domain(f).len() > 1)
        .collect();
    if keep.is_empty() {
        return Err(Error::NoInformativeFeatures);
    }
    if keep.len() == dataset.n_features() {
        return Ok((dataset, Vec::new()));
    }
    let removed = (0..dataset.n_features())
        .filter(|f| !keep.contains(f))
        .map(|f| dataset.feature_name(f).to_string())
        .collect();
    Ok((dataset.select_features(&keep)?, removed))
}

/// Value supports, modes and cross-feature co-occurrence counts.
///
/// Counts are kept as integers; frequencies are derived as `count / N` on
/// demand. Co-occurrences are stored symmetrically in CSR form: the row of a
/// value lists every value of another feature it co-occurs with, by
/// increasing id.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyStats {
    n_objects: u64,
    feature_offsets: Vec<usize>,
    value_feature: Vec<usize>,
    supp: Vec<u64>,
    mode: Vec<usize>,
    joint_ptr: Vec<usize>,
    joint_ids: Vec<u32>,
    joint_counts: Vec<u64>,
}

impl FrequencyStats {
    pub fn n_objects(&self) -> u64 {
        self.n_objects
    }

    pub fn n_values(&self) -> usize {
        self.supp.len()
    }

    pub fn n_features(&self) -> usize {
        self.mode.len()
    }

    pub fn feature_domain(&self, f: usize) -> Range<usize> {
        self.feature_offsets[f]..self.feature_offsets[f + 1]
    }

    pub fn feature_of(&self, v: usize) -> usize {
        self.value_feature[v]
    }

    pub fn value_features(&self) -> &[usize] {
        &self.value_feature
    }

    pub fn supp(&self, v: usize) -> u64 {
        self.supp[v]
    }

    pub fn freq(&self, v: usize) -> f64 {
        self.supp[v] as f64 / self.n_objects as f64
    }

    /// Mode of feature `f`; ties resolved to the lowest value id.
    pub fn mode(&self, f: usize) -> usize {
        self.mode[f]
    }

    pub fn mode_supp(&self, f: usize) -> u64 {
        self.supp[self.mode[f]]
    }

    pub fn mode_freq(&self, f: usize) -> f64 {
        self.freq(self.mode[f])
    }

    /// Number of objects holding both `u` and `v`; zero for same-feature pairs.
    pub fn joint_supp(&self, u: usize, v: usize) -> u64 {
        let (s, e) = (self.joint_ptr[u], self.joint_ptr[u + 1]);
        match self.joint_ids[s..e].binary_search(&(v as u32)) {
            Ok(k) => self.joint_counts[s + k],
            Err(_) => 0,
        }
    }

    /// Co-occurring values of `u` with their joint support, by increasing id.
    pub fn cooccurrences(&self, u: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (s, e) = (self.joint_ptr[u], self.joint_ptr[u + 1]);
        self.joint_ids[s..e]
            .iter()
            .zip(&self.joint_counts[s..e])
            .map(|(&v, &c)| (v as usize, c))
    }

    /// Number of stored (ordered) co-occurring pairs.
    pub fn n_cooccurring_pairs(&self) -> usize {
        self.joint_ids.len()
    }
}

/// Single pass per feature pair over the columns; `O(N D^2)` in total. Feature
/// pairs are counted in parallel and merged in a fixed order, so the result
/// does not depend on the worker count.
pub fn compute_stats(dataset: &CategoricalDataset) -> FrequencyStats {
    let d = dataset.n_features();
    let n_values = dataset.n_values();
    let offsets = dataset.feature_offsets().to_vec();
    let cols = dataset.local_columns();
    let sizes: Vec<usize> = (0..d).map(|f| offsets[f + 1] - offsets[f]).collect();

    let mut supp = vec![0u64; n_values];
    for f in 0..d {
        for &c in &cols[f] {
            supp[offsets[f] + c as usize] += 1;
        }
    }
    let mode = (0..d)
        .map(|f| {
            let dom = offsets[f]..offsets[f + 1];
            // first maximum wins: lowest id among tied modes
            dom.fold(None, |best: Option<usize>, v| match best {
                Some(b) if supp[b] >= supp[v] => Some(b),
                _ => Some(v),
            })
            .expect("feature domain is never empty")
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let blocks: Vec<Vec<u64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ci, cj, wj) = (&cols[i], &cols[j], sizes[j]);
            let mut block = vec![0u64; sizes[i] * wj];
            for (&a, &b) in ci.iter().zip(cj) {
                block[a as usize * wj + b as usize] += 1;
            }
            block
        })
        .collect();
    let block_of = |i: usize, j: usize| -> usize {
        // index of (i, j), i < j, in the row-major upper-triangle enumeration
        i * d - i * (i + 1) / 2 + (j - i - 1)
    };

    let rows: Vec<(Vec<u32>, Vec<u64>)> = (0..n_values)
        .into_par_iter()
        .map(|u| {
            let fu = dataset.feature_of(u);
            let lu = u - offsets[fu];
            let mut ids = Vec::new();
            let mut counts = Vec::new();
            for g in 0..d {
                if g == fu {
                    continue;
                }
                for lv in 0..sizes[g] {
                    let c = if fu < g {
                        blocks[block_of(fu, g)][lu * sizes[g] + lv]
                    } else {
                        blocks[block_of(g, fu)][lv * sizes[fu] + lu]
                    };
                    if c > 0 {
                        ids.push((offsets[g] + lv) as u32);
                        counts.push(c);
                    }
                }
            }
            (ids, counts)
        })
        .collect();
    let mut joint_ptr = Vec::with_capacity(n_values + 1);
    joint_ptr.push(0);
    let total: usize = rows.iter().map(|r| r.0.len()).sum();
    let mut joint_ids = Vec::with_capacity(total);
    let mut joint_counts = Vec::with_capacity(total);
    for (ids, counts) in rows {
        joint_ids.extend(ids);
        joint_counts.extend(counts);
        joint_ptr.push(joint_ids.len());
    }

    FrequencyStats {
        n_objects: dataset.n_objects() as u64,
        feature_offsets: offsets,
        value_feature: dataset.value_features().to_vec(),
        supp,
        mode,
        joint_ptr,
        joint_ids,
        joint_counts,
    }
}
