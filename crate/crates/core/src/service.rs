//! HTTP session service.
//!
//! | method | path                          | body / query          |
//! |--------|-------------------------------|-----------------------|
//! | POST   | `/sessions`                   | [`CreateSession`]     |
//! | POST   | `/sessions/{id}/events`       | [`EventBatch`]        |
//! | PUT    | `/sessions/{id}/fcm`          | FCM document          |
//! | GET    | `/sessions/{id}/prompts`      | `?since=K`            |
//! | GET    | `/sessions/{id}/state`        |                       |
//! | GET    | `/worlds/{id}`                |                       |
//!
//! Errors come back as `{"code": ..., "message": ...}`. Each session sits
//! behind its own mutex, so batches and idle-timer ticks for one learner
//! are serialised while different sessions proceed in parallel. With a data
//! directory configured, every accepted change rewrites
//! `sessions/<id>.json`.

use std::collections::HashMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};

use crate::catalog::Catalog;
use crate::companion::{Action, OutboxEntry, Record, SessionState, StateSnapshot, WaitStatus};
use crate::error::Error;
use crate::fcm::{validate_fcm, Fcm, FcmDocument};
use crate::policy::{CuriosityProfile, PolicyConfig};
use crate::world::WorldMap;

pub const DATA_DIR_ENV: &str = "CC_DATA_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    pub world: String,
    pub learner_fcm: FcmDocument,
    pub profile: Vec<u8>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub policy: Option<PolicyConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventBatch {
    pub items: Vec<Action>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TickResult {
    pub accepted: usize,
    pub records: Vec<Record>,
    pub new_prompts: Vec<OutboxEntry>,
    pub wait: Option<WaitStatus>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptList {
    pub prompts: Vec<OutboxEntry>,
}

#[derive(Debug, Deserialize)]
struct Since {
    #[serde(default)]
    since: usize,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn session_not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "session_not_found",
            format!("session `{id}` not found"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::NotFound { kind: "world", .. } => (StatusCode::NOT_FOUND, "world_not_found"),
            Error::NotFound { .. } => (StatusCode::NOT_FOUND, "not_found"),
            Error::InvalidFcm(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_fcm"),
            Error::TimeRegression { .. } => (StatusCode::CONFLICT, "time_regression"),
            Error::Io { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "io_error"),
            _ => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                code: self.code,
                message: self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

/// Whole-document session persistence.
#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn new(data_dir: &Path) -> crate::Result<Self> {
        let dir = data_dir.join("sessions");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn save(&self, state: &SessionState) -> crate::Result<()> {
        let path = self.dir.join(format!("{}.json", state.id));
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(state).expect("session serialises");
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn load_all(&self) -> crate::Result<Vec<SessionState>> {
        let mut out = Vec::new();
        let entries = fs::read_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let state: SessionState =
                serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
            out.push(state);
        }
        Ok(out)
    }
}

struct Live {
    state: Mutex<SessionState>,
    /// Wall-clock instant corresponding to session time 0.
    epoch: Instant,
}

pub struct AppState {
    catalog: Catalog,
    sessions: RwLock<HashMap<String, Arc<Live>>>,
    store: Option<SessionStore>,
}

impl AppState {
    /// Builds the service state. With a data directory, catalog documents
    /// under it are added and persisted sessions are reloaded.
    pub fn new(data_dir: Option<&Path>) -> crate::Result<Arc<Self>> {
        let (catalog, store) = match data_dir {
            Some(dir) => (Catalog::with_dir(dir)?, Some(SessionStore::new(dir)?)),
            None => (Catalog::bundled(), None),
        };
        let mut sessions = HashMap::new();
        if let Some(store) = &store {
            let now = Instant::now();
            for state in store.load_all()? {
                catalog.world(&state.world_id)?;
                let epoch = now.checked_sub(Duration::from_millis(state.clock)).unwrap_or(now);
                sessions.insert(
                    state.id.clone(),
                    Arc::new(Live {
                        state: Mutex::new(state),
                        epoch,
                    }),
                );
            }
        }
        Ok(Arc::new(Self {
            catalog,
            sessions: RwLock::new(sessions),
            store,
        }))
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    async fn session(&self, id: &str) -> ApiResult<Arc<Live>> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::session_not_found(id))
    }

    fn persist(&self, state: &SessionState) -> ApiResult<()> {
        if let Some(store) = &self.store {
            store.save(state)?;
        }
        Ok(())
    }

    /// Fires overdue waits on every session, using wall-clock time since
    /// each session started.
    pub async fn fire_idle_timers(&self) {
        let live: Vec<Arc<Live>> = self.sessions.read().await.values().cloned().collect();
        for session in live {
            let mut state = session.state.lock().await;
            let Some(deadline) = state.wait.as_ref().map(|w| w.deadline) else {
                continue;
            };
            let elapsed = session.epoch.elapsed().as_millis() as u64;
            if elapsed < deadline || deadline < state.clock {
                continue;
            }
            let Ok(companion) = self.catalog.companion(&state.world_id) else {
                continue;
            };
            let mut next = state.clone();
            match companion.apply(&mut next, &Action::Tick { t: deadline }) {
                Ok(_) => {
                    if let Err(e) = self.persist(&next) {
                        tracing::warn!(session = %next.id, "persist failed: {}", e.message);
                        continue;
                    }
                    *state = next;
                }
                Err(e) => tracing::warn!(session = %state.id, "idle tick failed: {e}"),
            }
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/events", post(ingest))
        .route("/sessions/{id}/fcm", put(replace_fcm))
        .route("/sessions/{id}/prompts", get(get_prompts))
        .route("/sessions/{id}/state", get(get_state))
        .route("/worlds/{id}", get(get_world))
        .with_state(state)
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let companion = app.catalog.companion(&req.world)?;
    let report = validate_fcm(&req.learner_fcm);
    if !report.is_ok() {
        return Err(Error::InvalidFcm(report.violations.iter().map(ToString::to_string).collect()).into());
    }
    let learner = Fcm::try_from(req.learner_fcm)?;
    let profile = CuriosityProfile::new(req.profile)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let (state, _) = companion.start(id.clone(), learner, profile, req.policy.unwrap_or_default(), req.seed)?;
    app.persist(&state)?;
    app.sessions.write().await.insert(
        id.clone(),
        Arc::new(Live {
            state: Mutex::new(state),
            epoch: Instant::now(),
        }),
    );
    tracing::info!(session = %id, world = %req.world, "session created");
    Ok((StatusCode::CREATED, Json(Created { id })))
}

async fn ingest(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(batch): Json<EventBatch>,
) -> ApiResult<Json<TickResult>> {
    let session = app.session(&id).await?;
    let mut state = session.state.lock().await;
    let companion = app.catalog.companion(&state.world_id)?;
    let mut next = state.clone();
    let before = next.outbox.len();
    let records = companion.apply_batch(&mut next, &batch.items)?;
    app.persist(&next)?;
    *state = next;
    Ok(Json(TickResult {
        accepted: batch.items.len(),
        records,
        new_prompts: state.outbox[before..].to_vec(),
        wait: companion.snapshot(&state).wait,
    }))
}

async fn replace_fcm(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(doc): Json<FcmDocument>,
) -> ApiResult<Json<StateSnapshot>> {
    let fcm = Fcm::try_from(doc)?;
    let session = app.session(&id).await?;
    let mut state = session.state.lock().await;
    let companion = app.catalog.companion(&state.world_id)?;
    let mut next = state.clone();
    companion.replace_fcm(&mut next, fcm)?;
    app.persist(&next)?;
    *state = next;
    Ok(Json(companion.snapshot(&state)))
}

async fn get_prompts(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<Since>,
) -> ApiResult<Json<PromptList>> {
    let session = app.session(&id).await?;
    let state = session.state.lock().await;
    let prompts = state.outbox.get(q.since..).unwrap_or_default().to_vec();
    Ok(Json(PromptList { prompts }))
}

async fn get_state(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<StateSnapshot>> {
    let session = app.session(&id).await?;
    let state = session.state.lock().await;
    let companion = app.catalog.companion(&state.world_id)?;
    Ok(Json(companion.snapshot(&state)))
}

async fn get_world(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<WorldMap>> {
    Ok(Json(app.catalog.world(&id)?.clone()))
}

/// Binds `addr` and serves until Ctrl-C, running the idle timer alongside.
pub async fn serve(addr: SocketAddr, data_dir: Option<PathBuf>) -> crate::Result<()> {
    let app = AppState::new(data_dir.as_deref())?;
    let timer_app = Arc::clone(&app);
    tokio::spawn(async move {
        let mut every = tokio::time::interval(Duration::from_millis(100));
        loop {
            every.tick().await;
            timer_app.fire_idle_timers().await;
        }
    });
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(addr.to_string(), e))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}
