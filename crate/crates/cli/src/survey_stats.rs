//! Role consistency and demographic breakdowns over the survey join.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use talkshare::stats::{cohens_kappa, crosstab, quantile, raw_agreement, sign_test, CrossTabRow, Tail};

use crate::output::{to_json, OutputSet, RunManifest};
use crate::table::{load_joined, load_setup, SpeakerRow};
use crate::ConfigArgs;

/// Share-table rows with fewer conversations than this are flagged sparse.
const SPARSE_BELOW: usize = 10;

#[derive(Serialize)]
struct ConsistencyReport {
    seed: u64,
    speakers: usize,
    /// Speakers seen in at least two conversations with a known role.
    qualifying_speakers: usize,
    same_role: usize,
    agreement: Option<f64>,
    kappa: Option<f64>,
    note: Option<String>,
}

pub fn consistency(
    summary: &Path,
    survey: &Path,
    args: &ConfigArgs,
    enjoyment_max: u32,
    out_dir: &Path,
) -> Result<()> {
    let (cfg, roles) = load_setup(args)?;
    let rows = load_joined(summary, survey, roles.as_ref(), enjoyment_max)?;

    // speaker → (conversation, role), in conversation order
    let mut seen: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    for row in &rows {
        if row.role() != "other" {
            seen.entry(row.record.speaker.as_str())
                .or_default()
                .insert(row.record.conversation_id.as_str(), row.role());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for convs in seen.values().filter(|c| c.len() >= 2) {
        let roles: Vec<&str> = convs.values().copied().collect();
        let mut pick = rand::seq::index::sample(&mut rng, roles.len(), 2).into_vec();
        pick.sort_unstable();
        first.push(roles[pick[0]]);
        second.push(roles[pick[1]]);
    }

    let (agreement, kappa, note) = if first.is_empty() {
        (None, None, Some("not computable: no speaker has two conversations with a known role".into()))
    } else {
        let agreement = raw_agreement(&first, &second).ok();
        match cohens_kappa(&first, &second) {
            Ok(k) => (agreement, Some(k), None),
            Err(e) => (agreement, None, Some(format!("kappa not computable: {e}"))),
        }
    };
    let report = ConsistencyReport {
        seed: cfg.rng_seed,
        speakers: seen.len(),
        qualifying_speakers: first.len(),
        same_role: first.iter().zip(&second).filter(|(a, b)| a == b).count(),
        agreement,
        kappa,
        note,
    };

    let mut outputs = OutputSet::new(out_dir);
    outputs.add("consistency.json", to_json(&report)?);
    let mut inputs = vec![summary, survey];
    inputs.extend(args.config.as_deref());
    inputs.extend(args.roles.as_deref());
    outputs.commit(RunManifest::new("consistency", &cfg, &inputs)?)?;
    eprintln!(
        "{} qualifying speakers, agreement {}, kappa {}",
        report.qualifying_speakers,
        fmt_opt(report.agreement),
        fmt_opt(report.kappa)
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |v| format!("{v:.3}"))
}

pub struct DemographicsRequest<'a> {
    pub summary: &'a Path,
    pub survey: &'a Path,
    pub age_split: Option<u32>,
    pub age_gap: u32,
    pub cfg: &'a ConfigArgs,
    pub enjoyment_max: u32,
    pub out_dir: &'a Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gender {
    Male,
    Female,
}

fn gender(raw: Option<&str>) -> Option<Gender> {
    match raw?.trim().to_ascii_lowercase().as_str() {
        "m" | "male" | "man" => Some(Gender::Male),
        "f" | "female" | "woman" => Some(Gender::Female),
        _ => None,
    }
}

#[derive(Serialize)]
struct SignTestReport {
    /// Conversations entering the test.
    n: usize,
    /// Conversations whose primary speaker is male (gender test) or older
    /// (age test).
    successes: usize,
    share: Option<f64>,
    p_value: Option<f64>,
    note: Option<String>,
}

impl SignTestReport {
    fn new(successes: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Ok(Self {
                n,
                successes,
                share: None,
                p_value: None,
                note: Some("not computable: no qualifying conversations".into()),
            });
        }
        let p = sign_test(successes as u64, n as u64, Tail::Two)?.p_value;
        Ok(Self {
            n,
            successes,
            share: Some(successes as f64 / n as f64),
            p_value: Some(p),
            note: None,
        })
    }
}

#[derive(Serialize)]
struct DemographicsReport {
    age_split: f64,
    age_gap: u32,
    /// Conversations where both the primary and secondary speaker answered.
    conversations: usize,
    male_primary: SignTestReport,
    older_primary: SignTestReport,
    gender_by_stereotype: Vec<CrossTabRow<String>>,
    age_by_stereotype: Vec<CrossTabRow<String>>,
}

pub fn demographics(req: DemographicsRequest<'_>) -> Result<()> {
    let (cfg, roles) = load_setup(req.cfg)?;
    let rows = load_joined(req.summary, req.survey, roles.as_ref(), req.enjoyment_max)?;

    let ages: Vec<f64> = rows.iter().filter_map(|r| r.record.age).map(f64::from).collect();
    let split = match req.age_split {
        Some(s) => s as f64,
        None => quantile(&ages, 0.5).unwrap_or(f64::NAN),
    };

    // conversation → (primary, secondary)
    let mut pairs: BTreeMap<&str, (Option<&SpeakerRow>, Option<&SpeakerRow>)> = BTreeMap::new();
    for row in &rows {
        let slot = pairs.entry(row.record.conversation_id.as_str()).or_default();
        match row.role() {
            "primary" => slot.0 = Some(row),
            "secondary" => slot.1 = Some(row),
            _ => {}
        }
    }
    let pairs: Vec<(&SpeakerRow, &SpeakerRow)> = pairs
        .into_values()
        .filter_map(|(p, s)| Some((p?, s?)))
        .collect();

    let (mut mixed, mut male_primary) = (0, 0);
    let (mut gapped, mut older_primary) = (0, 0);
    let mut gender_rows = Vec::new();
    let mut age_rows = Vec::new();
    for (p, s) in &pairs {
        let stereotype = p.fields.get("stereotype").cloned().unwrap_or_default();
        let (gp, gs) = (gender(p.record.gender.as_deref()), gender(s.record.gender.as_deref()));
        let g = match (gp, gs) {
            (Some(a), Some(b)) if a != b => {
                mixed += 1;
                male_primary += (a == Gender::Male) as usize;
                "male_female"
            }
            (Some(Gender::Male), Some(Gender::Male)) => "both_male",
            (Some(Gender::Female), Some(Gender::Female)) => "both_female",
            _ => "other",
        };
        gender_rows.push((stereotype.clone(), Some(g.to_string())));

        let a = match (p.record.age, s.record.age) {
            (Some(ap), Some(as_)) => {
                if ap.abs_diff(as_) >= req.age_gap {
                    gapped += 1;
                    older_primary += (ap > as_) as usize;
                }
                match (ap as f64 >= split, as_ as f64 >= split) {
                    (true, true) => "both_older",
                    (false, false) => "both_younger",
                    _ => "younger_older",
                }
            }
            _ => "other",
        };
        age_rows.push((stereotype, Some(a.to_string())));
    }

    let report = DemographicsReport {
        age_split: split,
        age_gap: req.age_gap,
        conversations: pairs.len(),
        male_primary: SignTestReport::new(male_primary, mixed)?,
        older_primary: SignTestReport::new(older_primary, gapped)?,
        gender_by_stereotype: crosstab(&gender_rows, SPARSE_BELOW),
        age_by_stereotype: crosstab(&age_rows, SPARSE_BELOW),
    };

    let mut outputs = OutputSet::new(req.out_dir);
    outputs.add("demographics.json", to_json(&report)?);
    let mut inputs = vec![req.summary, req.survey];
    inputs.extend(req.cfg.config.as_deref());
    inputs.extend(req.cfg.roles.as_deref());
    outputs.commit(RunManifest::new("demographics", &cfg, &inputs)?)?;
    eprintln!(
        "{} conversations; male primary {}/{}; older primary {}/{}",
        pairs.len(),
        male_primary,
        mixed,
        older_primary,
        gapped
    );
    Ok(())
}
