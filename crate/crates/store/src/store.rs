use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Mutex, MutexGuard};

use rusqlite::{params, Connection, OptionalExtension, Row, Transaction};
use serde::Serialize;
use unfun_core::alignment::{similarity, tokenize};
use unfun_core::analysis::{AnalysisInput, AnalyzedPair, OppositionTaxonomy, PairAnnotation, PairInput};
use unfun_core::chunking::{shallow_parse, ChunkSequence};
use unfun_core::game::{
    aggregate_consensus, reward_rating, reward_unfun, ConsensusClass, HeadlineRef, ModifiedCandidate, RewardConfig,
    SatiricalCandidate, TaskAssignment, TaskPool, Verdict,
};
use unfun_core::records::{normalize_text, Headline, Origin, PlayerProfile, RatingRecord, Submission};
use unfun_core::OpKind;

use crate::formats::{CorpusLine, EditOpCounts, FieldMap, ImportReport, LineError, PairExportRecord};
use crate::schema::SCHEMA;
use crate::{content_id, corpus_headline_id, invalid, modified_headline_id, Result, StoreError};

/// Handle to the game database. All access goes through one connection,
/// so writes are serialized and every multi-row change is a transaction.
pub struct Store {
    conn: Mutex<Connection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmissionOutcome {
    pub submission: Submission,
    pub headline: Headline,
    /// False when the same player had already submitted this text.
    pub created: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RatingOutcome {
    Accepted(RatingRecord),
    Duplicate,
}

/// An original headline, one modification of it, and what is known about
/// the modification.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub pair_id: String,
    pub original: Headline,
    pub modified: Headline,
    /// In the order they were recorded.
    pub ratings: Vec<f64>,
    pub annotation: Option<PairAnnotation>,
}

impl PairRecord {
    pub fn to_input(&self) -> PairInput {
        PairInput {
            pair_id: self.pair_id.clone(),
            original: self.original.text.clone(),
            modified: self.modified.text.clone(),
            ratings: self.ratings.clone(),
            original_chunks: self.original.gold_chunks.clone(),
            modified_chunks: self.modified.gold_chunks.clone(),
        }
    }

    pub fn analyze(&self) -> AnalyzedPair {
        AnalyzedPair::new(self.to_input())
    }

    pub fn is_successful(&self) -> bool {
        aggregate_consensus(&self.ratings).ok() == Some(ConsensusClass::ConsensusSerious)
    }

    pub fn export_record(&self) -> PairExportRecord {
        let pair = self.analyze();
        let script = &pair.alignment.script;
        PairExportRecord {
            pair_id: self.pair_id.clone(),
            original: self.original.text.clone(),
            modified: self.modified.text.clone(),
            ratings: self.ratings.clone(),
            edit_distance: pair.distance(),
            chunk_edit_distance: Some(pair.chunk_distance),
            edit_ops: EditOpCounts {
                substitute: script.count(OpKind::Substitute),
                delete: script.count(OpKind::Delete),
                insert: script.count(OpKind::Insert),
            },
            annotations: self.annotation.clone(),
            original_gold_chunks: self.original.gold_chunks.clone(),
            modified_gold_chunks: self.modified.gold_chunks.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StoreCounts {
    pub serious: usize,
    pub satirical: usize,
    pub modified: usize,
    pub submissions: usize,
    pub ratings: usize,
    pub players: usize,
}

impl StoreCounts {
    pub fn headlines(&self) -> usize {
        self.serious + self.satirical + self.modified
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Serious => "SERIOUS",
        Verdict::Satirical => "SATIRICAL",
    }
}

fn check_value(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid("rating", format!("{value} is outside [0, 1]")))
    }
}

fn headline_from_row(row: &Row<'_>) -> rusqlite::Result<(String, String, String, Option<String>, Option<String>)> {
    Ok((row.get(0)?, row.get(1)?, row.get(2)?, row.get(3)?, row.get(4)?))
}

fn build_headline(raw: (String, String, String, Option<String>, Option<String>)) -> Result<Headline> {
    let (id, text, origin, parent_id, gold) = raw;
    Ok(Headline {
        id,
        text,
        origin: origin.parse()?,
        parent_id,
        gold_chunks: gold.map(|g| serde_json::from_str(&g)).transpose()?,
    })
}

const HEADLINE_COLUMNS: &str = "id, text, origin, parent_id, gold_chunks";

fn get_headline(conn: &Connection, id: &str) -> Result<Option<Headline>> {
    conn.query_row(
        &format!("SELECT {HEADLINE_COLUMNS} FROM headlines WHERE id = ?1"),
        [id],
        headline_from_row,
    )
    .optional()?
    .map(build_headline)
    .transpose()
}

fn ensure_player(conn: &Connection, player: &str, now: i64) -> Result<()> {
    conn.execute(
        "INSERT OR IGNORE INTO players (player_id, created_at) VALUES (?1, ?2)",
        params![player, now],
    )?;
    Ok(())
}

/// Chunk pattern stored alongside a headline, from gold chunks when given.
fn pattern_of(text: &str, gold: Option<&ChunkSequence>) -> String {
    match gold {
        Some(g) => g.pattern(),
        None => shallow_parse(&tokenize(text)).pattern(),
    }
}

fn vet_gold(text: &str, gold: Option<&ChunkSequence>) -> Result<Option<String>> {
    match gold {
        Some(g) if !g.covers_text(text) => Err(invalid("gold_chunks", format!("chunks do not cover `{text}`"))),
        Some(g) => Ok(Some(serde_json::to_string(g)?)),
        None => Ok(None),
    }
}

/// Inserts a corpus headline unless its id exists. Returns the id and
/// whether a row was added. Gold chunks fill in a missing annotation on an
/// existing row.
fn insert_corpus_headline(
    conn: &Connection,
    text: &str,
    origin: Origin,
    gold: Option<&ChunkSequence>,
) -> Result<(String, bool)> {
    let text = normalize_text(text);
    if text.is_empty() {
        return Err(invalid("headline", "empty text"));
    }
    let gold_json = vet_gold(&text, gold)?;
    let id = corpus_headline_id(&text);
    let added = conn.execute(
        "INSERT OR IGNORE INTO headlines (id, text, origin, gold_chunks, chunk_pattern) VALUES (?1, ?2, ?3, ?4, ?5)",
        params![id, text, origin.as_str(), gold_json, pattern_of(&text, gold)],
    )? == 1;
    if !added && gold_json.is_some() {
        conn.execute(
            "UPDATE headlines SET gold_chunks = ?2, chunk_pattern = ?3 WHERE id = ?1 AND gold_chunks IS NULL",
            params![id, gold_json, pattern_of(&text, gold)],
        )?;
    }
    Ok((id, added))
}

fn insert_modified_headline(
    conn: &Connection,
    parent: &Headline,
    text: &str,
    gold: Option<&ChunkSequence>,
) -> Result<(Headline, bool)> {
    if parent.origin != Origin::Satirical {
        return Err(StoreError::NotSatirical(parent.id.clone()));
    }
    let text = normalize_text(text);
    if text.is_empty() {
        return Err(invalid("modified headline", "empty text"));
    }
    let gold_json = vet_gold(&text, gold)?;
    let id = modified_headline_id(&parent.id, &text);
    let added = conn.execute(
        "INSERT OR IGNORE INTO headlines (id, text, origin, parent_id, gold_chunks, chunk_pattern)
         VALUES (?1, ?2, 'MODIFIED', ?3, ?4, ?5)",
        params![id, text, parent.id, gold_json, pattern_of(&text, gold)],
    )? == 1;
    if !added && gold_json.is_some() {
        conn.execute(
            "UPDATE headlines SET gold_chunks = ?2, chunk_pattern = ?3 WHERE id = ?1 AND gold_chunks IS NULL",
            params![id, gold_json, pattern_of(&text, gold)],
        )?;
    }
    let headline = get_headline(conn, &id)?.ok_or_else(|| StoreError::UnknownHeadline(id.clone()))?;
    Ok((headline, added))
}

fn insert_rating(conn: &Connection, player: &str, target: &str, value: f64, now: i64) -> Result<RatingOutcome> {
    check_value(value)?;
    if get_headline(conn, target)?.is_none() {
        return Err(StoreError::UnknownHeadline(target.to_string()));
    }
    let id = content_id(&[player, target]);
    let added = conn.execute(
        "INSERT OR IGNORE INTO ratings (id, player_id, target_id, value, created_at) VALUES (?1, ?2, ?3, ?4, ?5)",
        params![id, player, target, value, now],
    )? == 1;
    Ok(if added {
        RatingOutcome::Accepted(RatingRecord {
            id,
            player_id: player.to_string(),
            target_id: target.to_string(),
            value,
            created_at: now,
        })
    } else {
        RatingOutcome::Duplicate
    })
}

/// Runs `f` on each non-blank line inside its own savepoint; a failing
/// line is rolled back and reported, the rest continue.
fn import_lines<R, F>(tx: &mut Transaction<'_>, reader: R, mut f: F) -> Result<ImportReport>
where
    R: BufRead,
    F: FnMut(&Connection, &str) -> Result<bool>,
{
    let mut report = ImportReport::default();
    for (idx, line) in reader.split(b'\n').enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let text = match std::str::from_utf8(&line) {
            Ok(t) => t.trim(),
            Err(e) => {
                report.errors.push(LineError {
                    line: line_no,
                    message: format!("invalid UTF-8: {e}"),
                });
                continue;
            }
        };
        if text.is_empty() {
            continue;
        }
        let sp = tx.savepoint()?;
        match f(&sp, text) {
            Ok(added) => {
                sp.commit()?;
                if added {
                    report.inserted += 1;
                } else {
                    report.duplicates += 1;
                }
            }
            Err(StoreError::Sqlite(e)) => return Err(StoreError::Sqlite(e)),
            Err(e) => {
                drop(sp);
                report.errors.push(LineError {
                    line: line_no,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(report)
}

impl Store {
    pub fn open(path: &Path) -> Result<Self> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        Self::init(conn)
    }

    pub fn open_in_memory() -> Result<Self> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self> {
        conn.pragma_update(None, "foreign_keys", "ON")?;
        conn.execute_batch(SCHEMA)?;
        Ok(Store { conn: Mutex::new(conn) })
    }

    fn conn(&self) -> MutexGuard<'_, Connection> {
        self.conn.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Writes the WAL back into the main file.
    pub fn checkpoint(&self) -> Result<()> {
        self.conn()
            .query_row("PRAGMA wal_checkpoint(TRUNCATE)", [], |_| Ok(()))?;
        Ok(())
    }

    pub fn import_corpus(&self, path: &Path, origin: Origin, map: &FieldMap) -> Result<ImportReport> {
        let file = File::open(path)?;
        self.import_corpus_reader(BufReader::new(file), origin, map)
    }

    /// Imports corpus JSONL. Text is normalized and deduplicated by content
    /// hash; malformed lines are reported and skipped.
    pub fn import_corpus_reader<R: BufRead>(&self, reader: R, origin: Origin, map: &FieldMap) -> Result<ImportReport> {
        if origin == Origin::Modified {
            return Err(invalid("origin", "corpora are SERIOUS or SATIRICAL"));
        }
        let mut conn = self.conn();
        let mut tx = conn.transaction()?;
        let report = import_lines(&mut tx, reader, |conn, line| {
            let record: CorpusLine = map.parse(line)?;
            Ok(insert_corpus_headline(conn, &record.text, origin, record.gold_chunks.as_ref())?.1)
        })?;
        tx.commit()?;
        Ok(report)
    }

    pub fn headline(&self, id: &str) -> Result<Option<Headline>> {
        get_headline(&self.conn(), id)
    }

    /// Headlines ordered by id, optionally of one origin.
    pub fn headlines(&self, origin: Option<Origin>) -> Result<Vec<Headline>> {
        let conn = self.conn();
        let mut stmt = conn.prepare(&format!(
            "SELECT {HEADLINE_COLUMNS} FROM headlines WHERE ?1 IS NULL OR origin = ?1 ORDER BY id"
        ))?;
        let rows = stmt.query_map([origin.map(Origin::as_str)], headline_from_row)?;
        rows.map(|r| build_headline(r?)).collect()
    }

    pub fn ensure_player(&self, player: &str, now: i64) -> Result<()> {
        ensure_player(&self.conn(), player, now)
    }

    /// Stores a player's modification of a satirical headline. Resubmitting
    /// the same text returns the existing records.
    pub fn record_submission(&self, player: &str, original_id: &str, text: &str, now: i64) -> Result<SubmissionOutcome> {
        let mut conn = self.conn();
        let tx = conn.transaction()?;
        let parent = get_headline(&tx, original_id)?.ok_or_else(|| StoreError::UnknownHeadline(original_id.into()))?;
        let (headline, _) = insert_modified_headline(&tx, &parent, text, None)?;
        ensure_player(&tx, player, now)?;
        let id = content_id(&[player, &parent.id, &headline.text]);
        let created = tx.execute(
            "INSERT OR IGNORE INTO submissions (id, player_id, original_id, modified_id, modified_text, created_at)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6)",
            params![id, player, parent.id, headline.id, headline.text, now],
        )? == 1;
        let submission = tx.query_row(
            "SELECT id, player_id, original_id, modified_text, created_at FROM submissions WHERE id = ?1",
            [&id],
            |r| {
                Ok(Submission {
                    id: r.get(0)?,
                    player_id: r.get(1)?,
                    original_id: r.get(2)?,
                    modified_text: r.get(3)?,
                    created_at: r.get(4)?,
                })
            },
        )?;
        tx.commit()?;
        Ok(SubmissionOutcome {
            submission,
            headline,
            created,
        })
    }

    /// Stores one rating; a second rating by the same player on the same
    /// headline is a duplicate and is not stored.
    pub fn record_rating(&self, player: &str, target_id: &str, value: f64, now: i64) -> Result<RatingOutcome> {
        let mut conn = self.conn();
        let tx = conn.transaction()?;
        let outcome = insert_rating(&tx, player, target_id, value, now)?;
        ensure_player(&tx, player, now)?;
        tx.commit()?;
        Ok(outcome)
    }

    pub fn ratings_of(&self, target_id: &str) -> Result<Vec<f64>> {
        let conn = self.conn();
        let mut stmt = conn.prepare("SELECT value FROM ratings WHERE target_id = ?1 ORDER BY rowid")?;
        let values = stmt.query_map([target_id], |r| r.get(0))?.collect::<rusqlite::Result<_>>()?;
        Ok(values)
    }

    /// Everything the sampler may hand to `player`. Ground-truth headlines
    /// the player already rated are left out.
    pub fn task_pool_for(&self, player: &str) -> Result<TaskPool> {
        let conn = self.conn();
        let mut pool = TaskPool::default();

        let mut stmt = conn.prepare(
            "SELECT id, text, origin, chunk_pattern,
                    EXISTS (SELECT 1 FROM ratings r WHERE r.target_id = h.id AND r.player_id = ?1),
                    parent_id
             FROM headlines h ORDER BY id",
        )?;
        let mut modified: BTreeMap<String, ModifiedCandidate> = BTreeMap::new();
        let rows = stmt.query_map([player], |r| {
            Ok((
                r.get::<_, String>(0)?,
                r.get::<_, String>(1)?,
                r.get::<_, String>(2)?,
                r.get::<_, Option<String>>(3)?,
                r.get::<_, bool>(4)?,
                r.get::<_, Option<String>>(5)?,
            ))
        })?;
        for row in rows {
            let (id, text, origin, pattern, rated_by_player, parent_id) = row?;
            let headline = HeadlineRef { id: id.clone(), text };
            match origin.parse::<Origin>()? {
                Origin::Satirical => {
                    if !rated_by_player {
                        pool.satirical_truth.push(headline.clone());
                    }
                    pool.satirical.push(SatiricalCandidate { headline, pattern });
                }
                Origin::Serious if !rated_by_player => pool.serious_truth.push(headline),
                Origin::Serious => {}
                Origin::Modified => {
                    modified.insert(
                        id,
                        ModifiedCandidate {
                            headline,
                            parent_id,
                            ..Default::default()
                        },
                    );
                }
            }
        }
        let mut stmt = conn.prepare("SELECT modified_id, player_id FROM submissions")?;
        for row in stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, String>(1)?)))? {
            let (id, author) = row?;
            if let Some(m) = modified.get_mut(&id) {
                m.authors.insert(author);
            }
        }
        let mut stmt = conn.prepare("SELECT target_id, player_id FROM ratings")?;
        for row in stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, String>(1)?)))? {
            let (id, rater) = row?;
            if let Some(m) = modified.get_mut(&id) {
                m.raters.insert(rater);
            }
        }
        pool.modified = modified.into_values().collect();
        Ok(pool)
    }

    /// Remembers a rating task so its answer can be checked. Unfun tasks
    /// need no bookkeeping.
    pub fn issue_task(&self, player: &str, task: &TaskAssignment, now: i64) -> Result<()> {
        let (Some(modified), Some((truth_item, truth))) = (task.modified(), task.ground_truth()) else {
            return Ok(());
        };
        let conn = self.conn();
        ensure_player(&conn, player, now)?;
        conn.execute(
            "INSERT INTO issued_tasks (player_id, modified_id, truth_id, truth, created_at) VALUES (?1, ?2, ?3, ?4, ?5)",
            params![player, modified.id, truth_item.id, verdict_str(truth), now],
        )?;
        Ok(())
    }

    /// Records the answer to an issued rating task and credits the rating
    /// reward, scored on the ground-truth item only. Returns the reward.
    pub fn complete_rating_task(
        &self,
        player: &str,
        items: &[(String, f64)],
        cfg: &RewardConfig,
        now: i64,
    ) -> Result<f64> {
        let [(a, va), (b, vb)] = items else {
            return Err(invalid("rating task answer", format!("expected 2 items, got {}", items.len())));
        };
        check_value(*va)?;
        check_value(*vb)?;
        let mut conn = self.conn();
        let tx = conn.transaction()?;
        let task: Option<(i64, String, String, bool)> = tx
            .query_row(
                "SELECT id, truth_id, truth, answered FROM issued_tasks
                 WHERE player_id = ?1
                   AND ((modified_id = ?2 AND truth_id = ?3) OR (modified_id = ?3 AND truth_id = ?2))
                 ORDER BY answered ASC, id DESC LIMIT 1",
                params![player, a, b],
                |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?)),
            )
            .optional()?;
        let (task_id, truth_id, truth, answered) = task.ok_or(StoreError::TaskNotIssued)?;
        if answered {
            return Err(StoreError::Duplicate);
        }
        for (id, value) in [(a, *va), (b, *vb)] {
            if insert_rating(&tx, player, id, value, now)? == RatingOutcome::Duplicate {
                return Err(StoreError::Duplicate);
            }
        }
        let truth = if truth == "SERIOUS" {
            Verdict::Serious
        } else {
            Verdict::Satirical
        };
        let p = if *a == truth_id { *va } else { *vb };
        let reward = reward_rating(p, truth, cfg);
        ensure_player(&tx, player, now)?;
        tx.execute(
            "UPDATE players SET rating_reward = rating_reward + ?2, rating_tasks = rating_tasks + 1 WHERE player_id = ?1",
            params![player, reward],
        )?;
        tx.execute("UPDATE issued_tasks SET answered = 1 WHERE id = ?1", [task_id])?;
        tx.commit()?;
        Ok(reward)
    }

    /// Per-player unfun reward and submission count, each submission scored
    /// from the ratings its headline has now.
    fn unfun_rewards(conn: &Connection, cfg: &RewardConfig) -> Result<HashMap<String, (f64, u64)>> {
        let mut stmt = conn.prepare(
            "SELECT s.player_id, o.text, s.modified_text,
                    (SELECT TOTAL(value) FROM ratings r WHERE r.target_id = s.modified_id),
                    (SELECT COUNT(*) FROM ratings r WHERE r.target_id = s.modified_id)
             FROM submissions s JOIN headlines o ON o.id = s.original_id
             ORDER BY s.rowid",
        )?;
        let mut out: HashMap<String, (f64, u64)> = HashMap::new();
        let rows = stmt.query_map([], |r| {
            Ok((
                r.get::<_, String>(0)?,
                r.get::<_, String>(1)?,
                r.get::<_, String>(2)?,
                r.get::<_, f64>(3)?,
                r.get::<_, i64>(4)?,
            ))
        })?;
        for row in rows {
            let (player, original, modified, total, n) = row?;
            let r = if n > 0 { total / n as f64 } else { 0.0 };
            let s = similarity(&tokenize(&original), &tokenize(&modified));
            let entry = out.entry(player).or_default();
            entry.0 += reward_unfun(r.clamp(0.0, 1.0), s, cfg)?;
            entry.1 += 1;
        }
        Ok(out)
    }

    fn profiles(&self, cfg: &RewardConfig) -> Result<Vec<PlayerProfile>> {
        let conn = self.conn();
        let unfun = Self::unfun_rewards(&conn, cfg)?;
        let mut stmt = conn.prepare("SELECT player_id, rating_reward, rating_tasks FROM players ORDER BY player_id")?;
        let rows = stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, f64>(1)?, r.get::<_, i64>(2)?)))?;
        let mut profiles = Vec::new();
        for row in rows {
            let (player_id, rating_reward, rating_tasks) = row?;
            let (unfun_reward, unfun_count) = unfun.get(&player_id).copied().unwrap_or_default();
            profiles.push(PlayerProfile {
                player_id,
                cumulative_unfun_reward: unfun_reward,
                cumulative_rating_reward: rating_reward,
                unfun_count,
                rating_count: rating_tasks as u64,
            });
        }
        Ok(profiles)
    }

    pub fn profile(&self, player: &str, cfg: &RewardConfig) -> Result<Option<PlayerProfile>> {
        Ok(self.profiles(cfg)?.into_iter().find(|p| p.player_id == player))
    }

    /// Players who completed at least one task, highest total reward first.
    pub fn leaderboard(&self, limit: usize, cfg: &RewardConfig) -> Result<Vec<PlayerProfile>> {
        let mut profiles: Vec<PlayerProfile> = self
            .profiles(cfg)?
            .into_iter()
            .filter(|p| p.unfun_count + p.rating_count > 0)
            .collect();
        profiles.sort_by(|a, b| {
            b.total_reward()
                .total_cmp(&a.total_reward())
                .then_with(|| a.player_id.cmp(&b.player_id))
        });
        profiles.truncate(limit);
        Ok(profiles)
    }

    fn annotation_map(conn: &Connection) -> Result<HashMap<String, PairAnnotation>> {
        let mut stmt = conn.prepare("SELECT pair_id, body FROM annotations")?;
        let rows = stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, String>(1)?)))?;
        let mut out = HashMap::new();
        for row in rows {
            let (id, body) = row?;
            out.insert(id, serde_json::from_str(&body)?);
        }
        Ok(out)
    }

    pub fn annotations(&self) -> Result<Vec<PairAnnotation>> {
        let mut all: Vec<PairAnnotation> = Self::annotation_map(&self.conn())?.into_values().collect();
        all.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        Ok(all)
    }

    /// Every modified headline joined to its original, ordered by pair id.
    pub fn pairs(&self) -> Result<Vec<PairRecord>> {
        let conn = self.conn();
        let mut ratings: HashMap<String, Vec<f64>> = HashMap::new();
        let mut stmt = conn.prepare("SELECT target_id, value FROM ratings ORDER BY rowid")?;
        for row in stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, f64>(1)?)))? {
            let (id, v) = row?;
            ratings.entry(id).or_default().push(v);
        }
        let mut annotations = Self::annotation_map(&conn)?;
        let mut stmt = conn.prepare(
            "SELECT m.id, m.text, m.origin, m.parent_id, m.gold_chunks,
                    o.id, o.text, o.origin, o.parent_id, o.gold_chunks
             FROM headlines m JOIN headlines o ON o.id = m.parent_id
             WHERE m.origin = 'MODIFIED' ORDER BY m.id",
        )?;
        let rows = stmt.query_map([], |r| {
            Ok((
                (r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?, r.get(4)?),
                (r.get(5)?, r.get(6)?, r.get(7)?, r.get(8)?, r.get(9)?),
            ))
        })?;
        let mut pairs = Vec::new();
        for row in rows {
            let (m, o) = row?;
            let modified = build_headline(m)?;
            let original = build_headline(o)?;
            pairs.push(PairRecord {
                pair_id: modified.id.clone(),
                ratings: ratings.remove(&modified.id).unwrap_or_default(),
                annotation: annotations.remove(&modified.id),
                original,
                modified,
            });
        }
        Ok(pairs)
    }

    /// Pairs whose modification reached consensus serious with at least
    /// two ratings.
    pub fn successful_pairs(&self) -> Result<Vec<PairRecord>> {
        Ok(self.pairs()?.into_iter().filter(PairRecord::is_successful).collect())
    }

    /// Origin and ratings of every rated headline, ordered by id.
    pub fn rated_headlines(&self) -> Result<Vec<(Origin, Vec<f64>)>> {
        let conn = self.conn();
        let mut stmt = conn.prepare(
            "SELECT h.id, h.origin, r.value FROM ratings r JOIN headlines h ON h.id = r.target_id
             ORDER BY h.id, r.rowid",
        )?;
        let mut out: Vec<(String, Origin, Vec<f64>)> = Vec::new();
        let rows = stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, String>(1)?, r.get::<_, f64>(2)?)))?;
        for row in rows {
            let (id, origin, value) = row?;
            match out.last_mut() {
                Some((last, _, values)) if *last == id => values.push(value),
                _ => out.push((id, origin.parse()?, vec![value])),
            }
        }
        Ok(out.into_iter().map(|(_, o, v)| (o, v)).collect())
    }

    /// Snapshot for the analyses. Stored annotations are used unless
    /// `annotations` overrides them.
    pub fn analysis_input(
        &self,
        annotations: Option<Vec<PairAnnotation>>,
        taxonomy: OppositionTaxonomy,
    ) -> Result<AnalysisInput> {
        let pairs: Vec<AnalyzedPair> = self.pairs()?.iter().map(PairRecord::analyze).collect();
        let satirical_chunks = self
            .headlines(Some(Origin::Satirical))?
            .into_iter()
            .map(|h| h.gold_chunks.unwrap_or_else(|| shallow_parse(&tokenize(&h.text))))
            .collect();
        let annotations = match annotations {
            Some(a) => Some(a),
            None => Some(self.annotations()?).filter(|a| !a.is_empty()),
        };
        Ok(AnalysisInput {
            pairs,
            rated_headlines: self.rated_headlines()?,
            satirical_chunks,
            annotations,
            taxonomy,
        })
    }

    /// Writes the pair export, one JSON object per line. Returns the
    /// record count.
    pub fn export_pairs<W: Write>(&self, mut out: W) -> Result<usize> {
        let pairs = self.pairs()?;
        for pair in &pairs {
            serde_json::to_writer(&mut out, &pair.export_record())?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(pairs.len())
    }

    pub fn export_pairs_to_path(&self, path: &Path) -> Result<usize> {
        self.export_pairs(BufWriter::new(File::create(path)?))
    }

    pub fn import_pairs(&self, path: &Path, map: &FieldMap) -> Result<ImportReport> {
        self.import_pairs_reader(BufReader::new(File::open(path)?), map)
    }

    /// Imports pair-export JSONL. Originals become satirical headlines;
    /// ratings are attributed to placeholder raters `imported-<i>` by
    /// position, so importing the same file twice adds nothing.
    pub fn import_pairs_reader<R: BufRead>(&self, reader: R, map: &FieldMap) -> Result<ImportReport> {
        let mut conn = self.conn();
        let mut tx = conn.transaction()?;
        let report = import_lines(&mut tx, reader, |conn, line| {
            let record: PairExportRecord = map.parse(line)?;
            let (original_id, _) = insert_corpus_headline(
                conn,
                &record.original,
                Origin::Satirical,
                record.original_gold_chunks.as_ref(),
            )?;
            let parent = get_headline(conn, &original_id)?.ok_or_else(|| StoreError::UnknownHeadline(original_id))?;
            let (modified, added) =
                insert_modified_headline(conn, &parent, &record.modified, record.modified_gold_chunks.as_ref())?;
            for (i, &value) in record.ratings.iter().enumerate() {
                insert_rating(conn, &format!("imported-{i}"), &modified.id, value, 0)?;
            }
            if let Some(mut annotation) = record.annotations {
                annotation.pair_id = modified.id.clone();
                conn.execute(
                    "INSERT OR REPLACE INTO annotations (pair_id, body) VALUES (?1, ?2)",
                    params![modified.id, serde_json::to_string(&annotation)?],
                )?;
            }
            Ok(added)
        })?;
        tx.commit()?;
        Ok(report)
    }

    pub fn import_annotations(&self, path: &Path, taxonomy: &OppositionTaxonomy) -> Result<ImportReport> {
        self.import_annotations_reader(BufReader::new(File::open(path)?), taxonomy)
    }

    /// Imports the annotation sidecar. Each line must name a stored pair
    /// and use labels from `taxonomy`; a later line for the same pair
    /// replaces the earlier one.
    pub fn import_annotations_reader<R: BufRead>(&self, reader: R, taxonomy: &OppositionTaxonomy) -> Result<ImportReport> {
        let mut conn = self.conn();
        let mut tx = conn.transaction()?;
        let report = import_lines(&mut tx, reader, |conn, line| {
            let annotation: PairAnnotation = serde_json::from_str(line)?;
            taxonomy.validate(&annotation)?;
            match get_headline(conn, &annotation.pair_id)? {
                Some(h) if h.origin == Origin::Modified => {}
                _ => return Err(StoreError::UnknownHeadline(annotation.pair_id)),
            }
            let replaced = conn.execute(
                "INSERT OR REPLACE INTO annotations (pair_id, body) VALUES (?1, ?2)",
                params![annotation.pair_id, serde_json::to_string(&annotation)?],
            )?;
            Ok(replaced == 1)
        })?;
        tx.commit()?;
        Ok(report)
    }

    pub fn counts(&self) -> Result<StoreCounts> {
        let conn = self.conn();
        let count = |sql: &str| -> Result<usize> { Ok(conn.query_row(sql, [], |r| r.get::<_, i64>(0))? as usize) };
        let mut by_origin: BTreeMap<String, usize> = BTreeMap::new();
        let mut stmt = conn.prepare("SELECT origin, COUNT(*) FROM headlines GROUP BY origin")?;
        for row in stmt.query_map([], |r| Ok((r.get::<_, String>(0)?, r.get::<_, i64>(1)?)))? {
            let (origin, n) = row?;
            by_origin.insert(origin, n as usize);
        }
        let of = |o: Origin| by_origin.get(o.as_str()).copied().unwrap_or(0);
        Ok(StoreCounts {
            serious: of(Origin::Serious),
            satirical: of(Origin::Satirical),
            modified: of(Origin::Modified),
            submissions: count("SELECT COUNT(*) FROM submissions")?,
            ratings: count("SELECT COUNT(*) FROM ratings")?,
            players: count("SELECT COUNT(*) FROM players")?,
        })
    }

    /// Ids of modified headlines the player wrote, for self-rating checks.
    pub fn authored_by(&self, player: &str) -> Result<BTreeSet<String>> {
        let conn = self.conn();
        let mut stmt = conn.prepare("SELECT modified_id FROM submissions WHERE player_id = ?1")?;
        let ids = stmt.query_map([player], |r| r.get(0))?.collect::<rusqlite::Result<_>>()?;
        Ok(ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SATIRICAL: &str = "God diagnosed with bipolar disorder";
    const SERIOUS: &str = "Bob Dylan diagnosed with bipolar disorder";

    fn store_with_corpus() -> (Store, String) {
        let store = Store::open_in_memory().unwrap();
        let corpus = format!("{{\"text\": \"{SATIRICAL}\"}}\n");
        store
            .import_corpus_reader(corpus.as_bytes(), Origin::Satirical, &FieldMap::default())
            .unwrap();
        store
            .import_corpus_reader(
                "{\"text\": \"Senate passes budget\"}\n".as_bytes(),
                Origin::Serious,
                &FieldMap::default(),
            )
            .unwrap();
        (store, corpus_headline_id(SATIRICAL))
    }

    #[test]
    fn corpus_import_counts_and_dedups() {
        let store = Store::open_in_memory().unwrap();
        let map = FieldMap::default();
        let three = "{\"text\": \"a b\"}\n{\"text\": \"c  d \"}\n{\"text\": \"e\"}\n";
        assert_eq!(store.import_corpus_reader(three.as_bytes(), Origin::Serious, &map).unwrap().inserted, 3);
        assert_eq!(store.headline(&corpus_headline_id("c d")).unwrap().unwrap().text, "c d");
        let again = store.import_corpus_reader(three.as_bytes(), Origin::Serious, &map).unwrap();
        assert_eq!((again.inserted, again.duplicates), (0, 3));

        let store = Store::open_in_memory().unwrap();
        let dup = "{\"text\": \"a b\"}\n{\"text\": \" a   b\"}\n{\"text\": \"e\"}\n";
        assert_eq!(store.import_corpus_reader(dup.as_bytes(), Origin::Serious, &map).unwrap().inserted, 2);

        let store = Store::open_in_memory().unwrap();
        let bad = "{\"text\": \"a b\"}\n{not json\n\n{\"text\": \"e\"}\n";
        let report = store.import_corpus_reader(bad.as_bytes(), Origin::Serious, &map).unwrap();
        assert_eq!(report.inserted, 2);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].line, 2);
    }

    #[test]
    fn gold_chunks_must_cover_the_text() {
        let store = Store::open_in_memory().unwrap();
        let line = r#"{"text": "God diagnosed", "gold_chunks": [{"label": "NP", "tokens": ["Bob"]}]}"#;
        let report = store
            .import_corpus_reader(line.as_bytes(), Origin::Satirical, &FieldMap::default())
            .unwrap();
        assert_eq!(report.inserted, 0);
        assert_eq!(report.errors.len(), 1);
    }

    #[test]
    fn submission_is_idempotent() {
        let (store, original) = store_with_corpus();
        let first = store.record_submission("p1", &original, SERIOUS, 10).unwrap();
        assert!(first.created);
        assert_eq!(first.headline.origin, Origin::Modified);
        assert_eq!(first.headline.parent_id.as_deref(), Some(original.as_str()));
        let again = store.record_submission("p1", &original, &format!(" {SERIOUS} "), 20).unwrap();
        assert!(!again.created);
        assert_eq!(again.submission, first.submission);
        assert_eq!(store.counts().unwrap().submissions, 1);

        assert!(matches!(
            store.record_submission("p1", "nope", SERIOUS, 0),
            Err(StoreError::UnknownHeadline(_))
        ));
        assert!(matches!(
            store.record_submission("p1", &original, "   ", 0),
            Err(StoreError::Invalid { .. })
        ));
        let serious_id = corpus_headline_id("Senate passes budget");
        assert!(matches!(
            store.record_submission("p1", &serious_id, "x", 0),
            Err(StoreError::NotSatirical(_))
        ));
    }

    #[test]
    fn ratings_reject_duplicates_and_bad_values() {
        let (store, original) = store_with_corpus();
        assert!(matches!(store.record_rating("p", &original, 0.3, 0).unwrap(), RatingOutcome::Accepted(_)));
        assert_eq!(store.record_rating("p", &original, 0.9, 0).unwrap(), RatingOutcome::Duplicate);
        assert_eq!(store.ratings_of(&original).unwrap(), [0.3]);
        assert!(matches!(store.record_rating("q", &original, 1.5, 0), Err(StoreError::Invalid { .. })));
        assert!(matches!(store.record_rating("q", "missing", 0.5, 0), Err(StoreError::UnknownHeadline(_))));
    }

    #[test]
    fn successful_pairs_need_two_serious_ratings() {
        let (store, original) = store_with_corpus();
        let pair = store.record_submission("author", &original, SERIOUS, 0).unwrap().headline.id;
        store.record_rating("r1", &pair, 0.9, 0).unwrap();
        assert!(store.successful_pairs().unwrap().is_empty());
        store.record_rating("r2", &pair, 0.8, 0).unwrap();
        let pairs = store.successful_pairs().unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].original.text, SATIRICAL);
        assert_eq!(pairs[0].ratings, [0.9, 0.8]);
    }

    #[test]
    fn lazy_unfun_reward() {
        let (store, original) = store_with_corpus();
        let cfg = RewardConfig::default();
        let pair = store.record_submission("author", &original, SERIOUS, 0).unwrap().headline.id;
        assert_eq!(store.profile("author", &cfg).unwrap().unwrap().cumulative_unfun_reward, 0.0);
        store.record_rating("r1", &pair, 0.8, 0).unwrap();
        store.record_rating("r2", &pair, 0.7, 0).unwrap();
        let profile = store.profile("author", &cfg).unwrap().unwrap();
        let expected = 1000.0 * (0.75f64 * 2.0 / 3.0).sqrt();
        assert!((profile.cumulative_unfun_reward - expected).abs() < 1e-9);
        assert_eq!(profile.unfun_count, 1);
    }

    #[test]
    fn rating_task_flow() {
        let (store, original) = store_with_corpus();
        let cfg = RewardConfig::default();
        let pair = store.record_submission("author", &original, SERIOUS, 0).unwrap().headline;
        let serious = store.headline(&corpus_headline_id("Senate passes budget")).unwrap().unwrap();
        let task = TaskAssignment::Rate {
            items: [
                HeadlineRef {
                    id: serious.id.clone(),
                    text: serious.text.clone(),
                },
                HeadlineRef {
                    id: pair.id.clone(),
                    text: pair.text.clone(),
                },
            ],
            modified_index: 1,
            truth: Verdict::Serious,
        };
        let answer = vec![(pair.id.clone(), 0.6), (serious.id.clone(), 0.99)];
        assert!(matches!(
            store.complete_rating_task("rater", &answer, &cfg, 0),
            Err(StoreError::TaskNotIssued)
        ));
        store.issue_task("rater", &task, 0).unwrap();
        let reward = store.complete_rating_task("rater", &answer, &cfg, 0).unwrap();
        assert!((reward - 200.0).abs() < 1e-9);
        assert!(matches!(
            store.complete_rating_task("rater", &answer, &cfg, 0),
            Err(StoreError::Duplicate)
        ));
        let profile = store.profile("rater", &cfg).unwrap().unwrap();
        assert_eq!(profile.rating_count, 1);
        assert!((profile.cumulative_rating_reward - 200.0).abs() < 1e-9);
        assert_eq!(store.ratings_of(&pair.id).unwrap(), [0.6]);

        let pool = store.task_pool_for("rater").unwrap();
        assert!(pool.serious_truth.is_empty());
        assert_eq!(pool.modified[0].raters.len(), 1);
        assert!(pool.modified[0].authors.contains("author"));
    }

    #[test]
    fn leaderboard_orders_by_total() {
        let (store, original) = store_with_corpus();
        let cfg = RewardConfig::default();
        assert!(store.leaderboard(10, &cfg).unwrap().is_empty());
        let pair = store.record_submission("author", &original, SERIOUS, 0).unwrap().headline.id;
        store.record_rating("r1", &pair, 0.8, 0).unwrap();
        store.record_rating("r2", &pair, 0.7, 0).unwrap();
        let board = store.leaderboard(10, &cfg).unwrap();
        assert_eq!(board.len(), 1);
        assert_eq!(board[0].player_id, "author");
    }

    #[test]
    fn export_import_round_trip() {
        let (store, original) = store_with_corpus();
        let pair = store.record_submission("author", &original, SERIOUS, 0).unwrap().headline.id;
        store.record_rating("r1", &pair, 0.8, 0).unwrap();
        store.record_rating("r2", &pair, 0.1, 0).unwrap();
        let annotation = format!(
            r#"{{"pair_id":"{pair}","oppositions":["high/low stature"],"abstract_class":"POSSIBLE_IMPOSSIBLE","explicit_side":"BAD"}}"#
        );
        let report = store
            .import_annotations_reader(annotation.as_bytes(), &OppositionTaxonomy::default())
            .unwrap();
        assert_eq!(report.inserted, 1);

        let mut first = Vec::new();
        assert_eq!(store.export_pairs(&mut first).unwrap(), 1);
        let copy = Store::open_in_memory().unwrap();
        assert_eq!(copy.import_pairs_reader(&first[..], &FieldMap::default()).unwrap().inserted, 1);
        let mut second = Vec::new();
        copy.export_pairs(&mut second).unwrap();
        assert_eq!(String::from_utf8(first).unwrap(), String::from_utf8(second).unwrap());
    }

    #[test]
    fn empty_export() {
        let store = Store::open_in_memory().unwrap();
        let mut out = Vec::new();
        assert_eq!(store.export_pairs(&mut out).unwrap(), 0);
        assert!(out.is_empty());
    }
}
