use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime};

use guidemap_core::interaction::InteractiveSession;
use tokio::sync::RwLock;
use uuid::Uuid;

/// Server-wide settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    /// Requested SLIC superpixel count per uploaded image.
    pub k: usize,
    /// Proposal cap; `None` uses the core default.
    pub max_proposals: Option<usize>,
    /// Largest accepted upload in bytes.
    pub max_bytes: usize,
    /// Sessions untouched for this long are dropped.
    pub idle_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            k: 1000,
            max_proposals: None,
            max_bytes: 16 * 1024 * 1024,
            idle_timeout: Duration::from_secs(30 * 60),
        }
    }
}

/// One live session. The tokio lock queues writers in arrival order.
#[derive(Debug)]
pub struct SessionHandle {
    pub id: String,
    pub created_at: SystemTime,
    last_used: Mutex<Instant>,
    pub state: Arc<RwLock<InteractiveSession>>,
}

impl SessionHandle {
    fn new(id: String, session: InteractiveSession) -> Self {
        Self {
            id,
            created_at: SystemTime::now(),
            last_used: Mutex::new(Instant::now()),
            state: Arc::new(RwLock::new(session)),
        }
    }

    pub fn touch(&self) {
        *self.last_used.lock().unwrap_or_else(|e| e.into_inner()) = Instant::now();
    }

    pub fn idle_since(&self) -> Instant {
        *self.last_used.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Debug, Default)]
pub struct AppState {
    pub config: ServiceConfig,
    sessions: std::sync::RwLock<HashMap<String, Arc<SessionHandle>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config,
            sessions: Default::default(),
        }
    }

    pub fn insert(&self, session: InteractiveSession) -> Arc<SessionHandle> {
        let mut map = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let id = loop {
            let id = Uuid::new_v4().simple().to_string();
            if !map.contains_key(&id) {
                break id;
            }
        };
        let handle = Arc::new(SessionHandle::new(id.clone(), session));
        map.insert(id, Arc::clone(&handle));
        handle
    }

    /// Looks a session up and marks it as used.
    pub fn get(&self, id: &str) -> Option<Arc<SessionHandle>> {
        let handle = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()?;
        handle.touch();
        Some(handle)
    }

    pub fn len(&self) -> usize {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the configured timeout as of `now`.
    /// Returns how many were removed.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let timeout = self.config.idle_timeout;
        let mut map = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let before = map.len();
        map.retain(|_, h| now.saturating_duration_since(h.idle_since()) <= timeout);
        before - map.len()
    }
}

/// Periodically expires idle sessions until the state is dropped elsewhere.
pub fn spawn_reaper(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let period = (state.config.idle_timeout / 4).max(Duration::from_secs(1));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let removed = state.expire_idle(Instant::now());
            if removed > 0 {
                tracing::info!(removed, "expired idle sessions");
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use guidemap_core::interaction::Scene;
    use guidemap_core::{ImageBuffer, SlicParams};

    fn session() -> InteractiveSession {
        let img = ImageBuffer::from_fn(8, 8, |_| [10, 20, 30]).unwrap();
        InteractiveSession::new(Scene::prepare(img, &SlicParams::new(4), None).unwrap()).unwrap()
    }

    #[test]
    fn ids_are_distinct() {
        let state = AppState::new(ServiceConfig::default());
        let a = state.insert(session());
        let b = state.insert(session());
        assert_ne!(a.id, b.id);
        assert_eq!(state.len(), 2);
    }

    #[test]
    fn idle_sessions_expire() {
        let state = AppState::new(ServiceConfig {
            idle_timeout: Duration::from_secs(60),
            ..ServiceConfig::default()
        });
        let h = state.insert(session());
        assert_eq!(state.expire_idle(Instant::now()), 0);
        assert_eq!(
            state.expire_idle(Instant::now() + Duration::from_secs(61)),
            1
        );
        assert!(state.get(&h.id).is_none());
    }
}
