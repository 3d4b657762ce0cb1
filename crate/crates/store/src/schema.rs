pub(crate) const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS headlines (
    id            TEXT PRIMARY KEY,
    text          TEXT NOT NULL,
    origin        TEXT NOT NULL CHECK (origin IN ('SERIOUS', 'SATIRICAL', 'MODIFIED')),
    parent_id     TEXT REFERENCES headlines(id),
    gold_chunks   TEXT,
    chunk_pattern TEXT,
    CHECK ((origin = 'MODIFIED') = (parent_id IS NOT NULL))
);
CREATE INDEX IF NOT EXISTS headlines_origin ON headlines(origin);
CREATE INDEX IF NOT EXISTS headlines_parent ON headlines(parent_id);

CREATE TABLE IF NOT EXISTS players (
    player_id     TEXT PRIMARY KEY,
    created_at    INTEGER NOT NULL,
    rating_reward REAL NOT NULL DEFAULT 0,
    rating_tasks  INTEGER NOT NULL DEFAULT 0
);

CREATE TABLE IF NOT EXISTS submissions (
    id            TEXT PRIMARY KEY,
    player_id     TEXT NOT NULL,
    original_id   TEXT NOT NULL REFERENCES headlines(id),
    modified_id   TEXT NOT NULL REFERENCES headlines(id),
    modified_text TEXT NOT NULL,
    created_at    INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS submissions_player ON submissions(player_id);

CREATE TABLE IF NOT EXISTS ratings (
    id         TEXT PRIMARY KEY,
    player_id  TEXT NOT NULL,
    target_id  TEXT NOT NULL REFERENCES headlines(id),
    value      REAL NOT NULL CHECK (value >= 0 AND value <= 1),
    created_at INTEGER NOT NULL,
    UNIQUE (player_id, target_id)
);
CREATE INDEX IF NOT EXISTS ratings_target ON ratings(target_id);

CREATE TABLE IF NOT EXISTS issued_tasks (
    id          INTEGER PRIMARY KEY,
    player_id   TEXT NOT NULL,
    modified_id TEXT NOT NULL REFERENCES headlines(id),
    truth_id    TEXT NOT NULL REFERENCES headlines(id),
    truth       TEXT NOT NULL CHECK (truth IN ('SERIOUS', 'SATIRICAL')),
    created_at  INTEGER NOT NULL,
    answered    INTEGER NOT NULL DEFAULT 0
);
CREATE INDEX IF NOT EXISTS issued_tasks_player ON issued_tasks(player_id);

CREATE TABLE IF NOT EXISTS annotations (
    pair_id TEXT PRIMARY KEY REFERENCES headlines(id),
    body    TEXT NOT NULL
);
";
