//! Dataset-level expressiveness metrics.
//!
//! Every metric here is a function of a per-graph representation key (a WL
//! histogram at some iteration, or a motif vector) together with the exact
//! isomorphism classes of the dataset:
//!
//! * identifiable fraction: share of unique graphs (graphs without an
//!   isomorphic duplicate) whose key no other graph in the dataset has;
//! * upper-bound accuracy: accuracy of the best deterministic predictor on
//!   the key, i.e. a majority vote inside every group of equal keys, over
//!   all graphs including duplicates.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::hash::Hash;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::{self, IsoClassIndex, IsoOptions, DEFAULT_ISO_BUDGET};
use crate::tu::Dataset;
use crate::wl::{self, ColorTable, WlSignature};

/// Exact ratio with a percentage view rounded half away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub hits: usize,
    pub total: usize,
}

impl Ratio {
    pub fn new(hits: usize, total: usize) -> Self {
        debug_assert!(hits <= total);
        Ratio { hits, total }
    }

    /// Percentage; an empty denominator counts as 100 (nothing to miss).
    pub fn pct(&self) -> f64 {
        if self.total == 0 {
            100.0
        } else {
            100.0 * self.hits as f64 / self.total as f64
        }
    }

    /// Percentage in hundredths, rounded half away from zero.
    pub fn pct_hundredths(&self) -> u64 {
        if self.total == 0 {
            return 10_000;
        }
        let (h, t) = (self.hits as u128, self.total as u128);
        ((h * 20_000 + t) / (2 * t)) as u64
    }

    /// Two-decimal percentage string, e.g. `32.32`.
    pub fn pct_string(&self) -> String {
        let v = self.pct_hundredths();
        format!("{}.{:02}", v / 100, v % 100)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pct_string())
    }
}

/// Which graphs count toward the identifiable fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Identifiability {
    /// Denominator: graphs with no isomorphic duplicate. Numerator: those
    /// among them whose key no other graph shares.
    #[default]
    UniqueGraphs,
    /// One representative per isomorphism class; identifiable when no other
    /// class shares the key.
    IsoClasses,
    /// Every graph, duplicates included.
    RawGraphs,
}

impl Identifiability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Identifiability::UniqueGraphs => "unique-graphs",
            Identifiability::IsoClasses => "iso-classes",
            Identifiability::RawGraphs => "raw-graphs",
        }
    }
}

/// Groups `members` by key, in order of first appearance.
pub fn group_by_key<K: Hash + Eq>(keys: &[K], members: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut index: HashMap<&K, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for m in members {
        let gi = *index.entry(&keys[m]).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[gi].push(m);
    }
    groups
}

/// Majority vote inside every group of equal keys, over all graphs.
/// Ties go to the smallest class id; the count is the same either way.
pub fn majority_vote<K: Hash + Eq>(keys: &[K], class_labels: &[u32]) -> Ratio {
    assert_eq!(keys.len(), class_labels.len());
    let mut correct = 0;
    for group in group_by_key(keys, 0..keys.len()) {
        let mut votes: HashMap<u32, usize> = HashMap::new();
        for &g in &group {
            *votes.entry(class_labels[g]).or_insert(0) += 1;
        }
        let (_, best) = votes
            .into_iter()
            .max_by_key(|&(class, count)| (count, std::cmp::Reverse(class)))
            .unwrap();
        correct += best;
    }
    Ratio::new(correct, keys.len())
}

pub fn identifiable<K: Hash + Eq>(keys: &[K], iso: &IsoClassIndex, convention: Identifiability) -> Ratio {
    assert_eq!(keys.len(), iso.graph_count());
    match convention {
        Identifiability::UniqueGraphs => {
            let mut count: HashMap<&K, usize> = HashMap::new();
            for k in keys {
                *count.entry(k).or_insert(0) += 1;
            }
            let unique = iso.unique_graphs();
            let hits = unique.iter().filter(|&&g| count[&keys[g]] == 1).count();
            Ratio::new(hits, unique.len())
        }
        Identifiability::IsoClasses => {
            let reps = iso.representatives();
            let mut count: HashMap<&K, usize> = HashMap::new();
            for &r in &reps {
                *count.entry(&keys[r]).or_insert(0) += 1;
            }
            let hits = reps.iter().filter(|&&r| count[&keys[r]] == 1).count();
            Ratio::new(hits, reps.len())
        }
        Identifiability::RawGraphs => {
            let mut count: HashMap<&K, usize> = HashMap::new();
            for k in keys {
                *count.entry(k).or_insert(0) += 1;
            }
            let hits = keys.iter().filter(|k| count[k] == 1).count();
            Ratio::new(hits, keys.len())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureGrouping {
    pub k: usize,
    pub groups: Vec<(WlSignature, Vec<usize>)>,
}

fn check_labels(d: &Dataset, use_labels: bool) -> Result<()> {
    if use_labels {
        if let Some(g) = d.graphs.iter().find(|g| !g.has_labels()) {
            return Err(Error::MissingLabels(format!("{}#{}", d.name, g.graph_id())));
        }
    }
    Ok(())
}

fn signatures_at(d: &Dataset, k: usize, use_labels: bool) -> Result<Vec<WlSignature>> {
    let mut table = ColorTable::new();
    let mut all = wl::dataset_signatures(&d.graphs, k, use_labels, &mut table)?;
    Ok(all.pop().unwrap())
}

fn iso_index(d: &Dataset, use_labels: bool) -> Result<IsoClassIndex> {
    iso::isomorphism_classes(
        d,
        IsoOptions {
            use_labels,
            budget: DEFAULT_ISO_BUDGET,
        },
    )
}

/// Groups graphs by iteration-`k` histogram. With `dedup`, only one
/// representative per isomorphism class takes part.
pub fn group_by_signature(
    d: &Dataset,
    k: usize,
    use_labels: bool,
    dedup: Option<&IsoClassIndex>,
) -> Result<SignatureGrouping> {
    check_labels(d, use_labels)?;
    let sigs = signatures_at(d, k, use_labels)?;
    let members: Vec<usize> = match dedup {
        Some(idx) => idx.representatives(),
        None => (0..d.len()).collect(),
    };
    let groups = group_by_key(&sigs, members)
        .into_iter()
        .map(|g| (sigs[g[0]].clone(), g))
        .collect();
    Ok(SignatureGrouping { k, groups })
}

pub fn identifiable_fraction(d: &Dataset, k: usize, use_labels: bool) -> Result<f64> {
    check_labels(d, use_labels)?;
    let sigs = signatures_at(d, k, use_labels)?;
    let idx = iso_index(d, use_labels)?;
    Ok(identifiable(&sigs, &idx, Identifiability::UniqueGraphs).pct())
}

pub fn upper_bound_accuracy(d: &Dataset, k: usize, use_labels: bool) -> Result<f64> {
    check_labels(d, use_labels)?;
    let sigs = signatures_at(d, k, use_labels)?;
    Ok(majority_vote(&sigs, &d.class_labels).pct())
}

/// `(identifiable %, upper bound %)` on iteration-0 histograms.
pub fn k0_baseline(d: &Dataset, use_labels: bool) -> Result<(f64, f64)> {
    Ok((
        identifiable_fraction(d, 0, use_labels)?,
        upper_bound_accuracy(d, 0, use_labels)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    With,
    Without,
}

impl LabelMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelMode::With => "with",
            LabelMode::Without => "without",
        }
    }

    pub fn uses_labels(&self) -> bool {
        matches!(self, LabelMode::With)
    }
}

/// Which label modes an audit covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelSelection {
    /// Both modes on labeled datasets, `without` otherwise.
    #[default]
    Auto,
    With,
    Without,
}

#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub k_max: usize,
    pub labels: LabelSelection,
    pub identifiability: Identifiability,
    /// Compute uniqueness without node labels even in `with` mode.
    pub unlabeled_uniqueness: bool,
    pub iso_budget: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            k_max: 3,
            labels: LabelSelection::Auto,
            identifiability: Identifiability::UniqueGraphs,
            unlabeled_uniqueness: false,
            iso_budget: DEFAULT_ISO_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRow {
    pub k: usize,
    pub identifiable: Ratio,
    pub identifiable_pct: String,
    pub upper_bound: Ratio,
    pub upper_bound_pct: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeReport {
    pub label_mode: LabelMode,
    pub iso_classes: usize,
    pub unique: Ratio,
    pub unique_pct: String,
    pub rows: Vec<AuditRow>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timing {
    pub isomorphism: Duration,
    pub refinement: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub dataset: String,
    pub graphs: usize,
    pub classes: usize,
    pub node_label_values: usize,
    pub k_max: usize,
    pub identifiability: Identifiability,
    pub modes: Vec<ModeReport>,
    /// Wall-clock timings; kept out of serialized output so reports are
    /// byte-identical across runs.
    #[serde(skip)]
    pub timing: Timing,
}

pub const CSV_HEADER: &str = "dataset,label_mode,k,identifiable_pct,upper_bound_pct,unique_pct";

impl AuditReport {
    pub fn mode(&self, mode: LabelMode) -> Option<&ModeReport> {
        self.modes.iter().find(|m| m.label_mode == mode)
    }

    /// CSV body rows (no header), one per `(label mode, k)`.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for m in &self.modes {
            for r in &m.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    self.dataset,
                    m.label_mode.as_str(),
                    r.k,
                    r.identifiable_pct,
                    r.upper_bound_pct,
                    m.unique_pct
                )
                .unwrap();
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{}: {} graphs, {} classes, {} node-label values",
            self.dataset, self.graphs, self.classes, self.node_label_values
        )
        .unwrap();
        for m in &self.modes {
            writeln!(
                out,
                "  labels={:<7} unique={} ({} of {}, {} iso classes)  identifiability={}",
                m.label_mode.as_str(),
                m.unique_pct,
                m.unique.hits,
                m.unique.total,
                m.iso_classes,
                self.identifiability.as_str()
            )
            .unwrap();
            let ks: Vec<String> = m.rows.iter().map(|r| format!("k={}", r.k)).collect();
            let ids: Vec<&str> = m.rows.iter().map(|r| r.identifiable_pct.as_str()).collect();
            let ubs: Vec<&str> = m.rows.iter().map(|r| r.upper_bound_pct.as_str()).collect();
            writeln!(out, "    {:<14}{}", "", ks.join(" ")).unwrap();
            writeln!(out, "    {:<14}{}", "identifiable", ids.join(" ")).unwrap();
            writeln!(out, "    {:<14}{}", "upper bound", ubs.join(" ")).unwrap();
        }
        out
    }
}

/// Runs every metric for `k = 0..=k_max` in each requested label mode.
pub fn run_audit(d: &Dataset, opts: &AuditOptions) -> Result<AuditReport> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let start = Instant::now();
    let modes: Vec<LabelMode> = match opts.labels {
        LabelSelection::Auto if d.has_node_labels => vec![LabelMode::With, LabelMode::Without],
        LabelSelection::Auto | LabelSelection::Without => vec![LabelMode::Without],
        LabelSelection::With => vec![LabelMode::With],
    };
    let mut timing = Timing::default();
    let mut reports = Vec::with_capacity(modes.len());
    for mode in modes {
        let use_labels = mode.uses_labels();
        check_labels(d, use_labels)?;

        let t = Instant::now();
        let idx = iso::isomorphism_classes(
            d,
            IsoOptions {
                use_labels: use_labels && !opts.unlabeled_uniqueness,
                budget: opts.iso_budget,
            },
        )?;
        timing.isomorphism += t.elapsed();

        let t = Instant::now();
        let mut table = ColorTable::new();
        let sigs = wl::dataset_signatures(&d.graphs, opts.k_max, use_labels, &mut table)?;
        let rows = sigs
            .iter()
            .enumerate()
            .map(|(k, sigs)| {
                let identifiable = identifiable(sigs, &idx, opts.identifiability);
                let upper_bound = majority_vote(sigs, &d.class_labels);
                AuditRow {
                    k,
                    identifiable_pct: identifiable.pct_string(),
                    identifiable,
                    upper_bound_pct: upper_bound.pct_string(),
                    upper_bound,
                }
            })
            .collect();
        timing.refinement += t.elapsed();

        let unique = Ratio::new(idx.unique_graphs().len(), d.len());
        reports.push(ModeReport {
            label_mode: mode,
            iso_classes: idx.len(),
            unique_pct: unique.pct_string(),
            unique,
            rows,
        });
    }
    timing.total = start.elapsed();
    Ok(AuditReport {
        dataset: d.name.clone(),
        graphs: d.len(),
        classes: d.num_classes,
        node_label_values: d.meta.node_label_values,
        k_max: opts.k_max,
        identifiability: opts.identifiability,
        modes: reports,
        timing,
    })
}
