use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PlannedVisit, BASE_TIMESTAMP_MS};

/// Delay between consecutive bot actions, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Delay {
    Zero,
    Fixed { ms: u64 },
    Uniform { min_ms: u64, max_ms: u64 },
}

impl Delay {
    fn draw(self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            Delay::Zero => 0,
            Delay::Fixed { ms } => ms,
            Delay::Uniform { min_ms, max_ms } => rng.gen_range(min_ms.min(max_ms)..=max_ms.max(min_ms)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacingConfig {
    pub keystroke: Delay,
    pub scroll: Delay,
    pub collect: Delay,
    pub seed: u64,
}

impl Default for PacingConfig {
    fn default() -> Self {
        PacingConfig {
            keystroke: Delay::Uniform {
                min_ms: 80,
                max_ms: 220,
            },
            scroll: Delay::Uniform {
                min_ms: 400,
                max_ms: 1500,
            },
            collect: Delay::Fixed { ms: 250 },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum PageAction {
    Visit,
    Type { ch: char },
    Scroll,
    Collect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacingEvent {
    pub engine: String,
    pub location: String,
    pub query_id: String,
    pub replica: u32,
    #[serde(flatten)]
    pub action: PageAction,
    pub at_ms: i64,
}

/// Timestamps for each bot action in plan order: a visit, one keystroke per
/// query character, a scroll and a collect. The log never feeds back into
/// generated results.
pub fn simulate_human_pacing(plan: &[PlannedVisit], config: &PacingConfig) -> Vec<PacingEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut clock = BASE_TIMESTAMP_MS;
    let mut log = Vec::new();
    for v in plan {
        let mut push = |action: PageAction, at_ms: i64| {
            log.push(PacingEvent {
                engine: v.engine.clone(),
                location: v.location.clone(),
                query_id: v.query_id.clone(),
                replica: v.replica,
                action,
                at_ms,
            })
        };
        push(PageAction::Visit, clock);
        for ch in v.query_text.chars() {
            clock += config.keystroke.draw(&mut rng) as i64;
            push(PageAction::Type { ch }, clock);
        }
        clock += config.scroll.draw(&mut rng) as i64;
        push(PageAction::Scroll, clock);
        clock += config.collect.draw(&mut rng) as i64;
        push(PageAction::Collect, clock);
    }
    log
}
