//! Client for an external constrained-quadratic-model solving service, plus
//! an offline test double.
//!
//! The restoration problem is serialized as a quadratic program over one
//! continuous variable per damaged link (`x<link id>`, bounded by the link's
//! headroom): the objective is a separable per-link quadratic fit of
//! `mu*D + (1-mu)*E` sampled at zero, half, and full recovery, and the budget
//! is an explicit linear `le` constraint. Capacity bounds travel as variable
//! bounds. The service answers asynchronously: submission returns a job id,
//! which is polled until completion. The returned sample is mapped back to a
//! plan and re-scored locally with a full equilibrium re-solve.
//!
//! Wire protocol (JSON over HTTP):
//! - `POST {endpoint}/jobs` with the payload below; responds
//!   `{"job_id": "...", "status": "pending"}`.
//! - `GET {endpoint}/jobs/{job_id}`; responds `{"status": "pending"}` until
//!   done, then `{"status": "completed", "sample": {"x1": 1.5, ...},
//!   "energy": 0.25}`, or `{"status": "infeasible", "message": "..."}`.
//! - Credentials ride in an `Authorization: Bearer <token>` header.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::demand::DemandTable;
use crate::error::Result;
use crate::network::Network;
use crate::objective::ObjectiveOptions;
use crate::scalar::{as_f64, cast, Scalar};
use crate::scenario::Scenario;
use crate::solution::{elapsed_s, EnergyContext, FitnessMode, Solution};

/// Failures talking to the solving service, by blame.
#[derive(Debug, thiserror::Error)]
pub enum CqmError {
    /// The endpoint could not be reached, or stopped answering in time.
    #[error("cannot reach solving service: {0}")]
    Connection(String),
    /// The service refused the credential.
    #[error("solving service rejected the credential: {0}")]
    Auth(String),
    /// The service understood the model and reported it has no feasible
    /// solution.
    #[error("solving service reported the model infeasible: {0}")]
    Infeasible(String),
    /// The service answered something outside the documented protocol.
    #[error("unexpected service response: {0}")]
    Protocol(String),
}

/// One bounded continuous decision variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqmVariable {
    pub id: String,
    pub lower: f64,
    pub upper: f64,
}

/// A quadratic objective monomial `coeff * u * v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticTerm {
    pub u: String,
    pub v: String,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CqmObjective {
    /// Linear coefficients by variable id.
    pub linear: BTreeMap<String, f64>,
    pub quadratic: Vec<QuadraticTerm>,
}

/// One linear constraint `sum(terms) <sense> rhs`; `sense` is `"le"`, `"ge"`,
/// or `"eq"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqmConstraint {
    pub terms: BTreeMap<String, f64>,
    pub sense: String,
    pub rhs: f64,
}

/// The document posted to the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqmPayload {
    pub variables: Vec<CqmVariable>,
    pub objective: CqmObjective,
    pub constraints: Vec<CqmConstraint>,
}

fn variable_id(link: crate::network::LinkId) -> String {
    format!("x{}", link.0)
}

/// Serializes the scenario as a constrained quadratic model. Each damaged
/// link's contribution to `mu*D + (1-mu)*E` is sampled at recoveries
/// `{0, h/2, h}` (others held at zero) and fitted exactly by a quadratic;
/// the shared constant term is dropped (it cannot move the argmin).
pub fn build_payload<S: Scalar>(
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
    options: ObjectiveOptions,
) -> Result<CqmPayload> {
    let ctx = EnergyContext::new(net, dem, sc, options, FitnessMode::Surrogate)?;
    let mut scratch = ctx.scratch();
    let mut probe = vec![S::zero(); ctx.dimension()];
    let base = ctx.surrogate_breakdown(&probe, &mut scratch)?.objective;

    let mut variables = Vec::with_capacity(ctx.dimension());
    let mut linear = BTreeMap::new();
    let mut quadratic = Vec::new();
    let mut budget_terms = BTreeMap::new();
    let half: S = cast(0.5);

    for (k, d) in ctx.damaged.iter().enumerate() {
        let id = variable_id(d.id);
        let headroom = as_f64(d.headroom);
        variables.push(CqmVariable {
            id: id.clone(),
            lower: 0.0,
            upper: headroom,
        });
        budget_terms.insert(id.clone(), 1.0);
        if !(d.headroom > S::zero()) {
            continue;
        }

        probe[k] = d.headroom * half;
        let f_mid = ctx.surrogate_breakdown(&probe, &mut scratch)?.objective;
        probe[k] = d.headroom;
        let f_full = ctx.surrogate_breakdown(&probe, &mut scratch)?.objective;
        probe[k] = S::zero();

        // Exact quadratic through (0, f0), (h/2, fm), (h, fh):
        // f(x) = f0 + b x + c x^2.
        let f0 = as_f64(base);
        let fm = as_f64(f_mid);
        let fh = as_f64(f_full);
        let h = headroom;
        let b = (4.0 * fm - 3.0 * f0 - fh) / h;
        let c = 2.0 * (f0 - 2.0 * fm + fh) / (h * h);
        if b != 0.0 {
            linear.insert(id.clone(), b);
        }
        if c != 0.0 {
            quadratic.push(QuadraticTerm { u: id.clone(), v: id, coeff: c });
        }
    }

    Ok(CqmPayload {
        variables,
        objective: CqmObjective { linear, quadratic },
        constraints: vec![CqmConstraint {
            terms: budget_terms,
            sense: "le".to_string(),
            rhs: as_f64(sc.budget),
        }],
    })
}

/// Where and how to reach the service.
#[derive(Debug, Clone)]
pub struct CqmClientConfig {
    /// Base URL, e.g. `http://solver.example:8080`.
    pub endpoint: String,
    /// Bearer credential; `None` sends no Authorization header.
    pub token: Option<String>,
    /// Per-request timeout.
    pub timeout: Duration,
    /// Pause between completion polls.
    pub poll_interval: Duration,
    /// Give up after this many polls.
    pub max_polls: usize,
}

impl CqmClientConfig {
    pub fn new(endpoint: impl Into<String>, token: Option<String>) -> Self {
        CqmClientConfig {
            endpoint: endpoint.into(),
            token,
            timeout: Duration::from_secs(30),
            poll_interval: Duration::from_millis(250),
            max_polls: 240,
        }
    }
}

/// Blocking HTTP client for the documented job protocol.
pub struct CqmClient {
    config: CqmClientConfig,
    http: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct SubmitResponse {
    job_id: String,
}

#[derive(Deserialize)]
struct JobResponse {
    status: String,
    #[serde(default)]
    sample: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    message: Option<String>,
}

impl CqmClient {
    pub fn new(config: CqmClientConfig) -> std::result::Result<Self, CqmError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| CqmError::Protocol(format!("cannot build HTTP client: {e}")))?;
        Ok(CqmClient { config, http })
    }

    fn base(&self) -> &str {
        self.config.endpoint.trim_end_matches('/')
    }

    fn authorize(
        &self,
        request: reqwest::blocking::RequestBuilder,
    ) -> reqwest::blocking::RequestBuilder {
        match &self.config.token {
            Some(token) => request.bearer_auth(token),
            None => request,
        }
    }

    fn check_status(
        response: reqwest::blocking::Response,
    ) -> std::result::Result<reqwest::blocking::Response, CqmError> {
        let status = response.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN
        {
            let body = response.text().unwrap_or_default();
            return Err(CqmError::Auth(format!("{status}: {body}")));
        }
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(CqmError::Protocol(format!("{status}: {body}")));
        }
        Ok(response)
    }

    /// Submits the model and polls until the service returns a sample.
    pub fn solve(
        &self,
        payload: &CqmPayload,
    ) -> std::result::Result<BTreeMap<String, f64>, CqmError> {
        let submit_url = format!("{}/jobs", self.base());
        let response = self
            .authorize(self.http.post(&submit_url).json(payload))
            .send()
            .map_err(|e| CqmError::Connection(e.to_string()))?;
        let response = Self::check_status(response)?;
        let submitted: SubmitResponse = response
            .json()
            .map_err(|e| CqmError::Protocol(format!("bad submission response: {e}")))?;

        let poll_url = format!("{}/jobs/{}", self.base(), submitted.job_id);
        for _ in 0..self.config.max_polls.max(1) {
            let response = self
                .authorize(self.http.get(&poll_url))
                .send()
                .map_err(|e| CqmError::Connection(e.to_string()))?;
            let response = Self::check_status(response)?;
            let job: JobResponse = response
                .json()
                .map_err(|e| CqmError::Protocol(format!("bad job response: {e}")))?;
            match job.status.as_str() {
                "pending" | "running" => std::thread::sleep(self.config.poll_interval),
                "completed" => {
                    return job.sample.ok_or_else(|| {
                        CqmError::Protocol("completed job carries no sample".to_string())
                    });
                }
                "infeasible" => {
                    return Err(CqmError::Infeasible(
                        job.message.unwrap_or_else(|| "no detail given".to_string()),
                    ));
                }
                other => {
                    return Err(CqmError::Protocol(format!("unknown job status {other:?}")));
                }
            }
        }
        Err(CqmError::Connection(format!(
            "job {} did not complete within {} polls",
            submitted.job_id, self.config.max_polls
        )))
    }
}

/// End-to-end remote solve: serialize, submit, poll, then map the sample back
/// to a plan (out-of-range values are clamped into bounds) and re-score it
/// locally with a full equilibrium re-solve.
pub fn submit_cqm<S: Scalar>(
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
    options: ObjectiveOptions,
    client: &CqmClient,
) -> Result<Solution<S>> {
    let start = Instant::now();
    let payload = build_payload(sc, net, dem, options)?;
    let sample = client.solve(&payload)?;
    let ctx = EnergyContext::new(net, dem, sc, options, FitnessMode::Surrogate)?;
    let recovery: Vec<S> = ctx
        .damaged
        .iter()
        .map(|d| {
            let raw = sample.get(&variable_id(d.id)).copied().unwrap_or(0.0);
            cast::<S>(raw).max(S::zero()).min(d.headroom)
        })
        .collect();
    ctx.make_solution(&recovery, "cqm", elapsed_s(start), 1, true)
}

/// Offline stand-in for the solving service: a real localhost HTTP listener
/// with scripted responses, for tests and demos without network access.
pub mod double {
    use std::collections::BTreeMap;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::sync::atomic::{AtomicBool, Ordering};
    use std::sync::{Arc, Mutex};
    use std::thread::JoinHandle;
    use std::time::Duration;

    /// What the scripted service should do.
    #[derive(Debug, Clone)]
    pub enum ServerScript {
        /// Accept the job, report `pending` for `pending_polls` status
        /// checks, then complete with the given sample.
        CompleteAfter {
            pending_polls: usize,
            sample: BTreeMap<String, f64>,
            energy: f64,
        },
        /// Reject every request with 401.
        RejectAuth,
        /// Accept the job, then report it infeasible.
        Infeasible { message: String },
        /// Answer 200 with a non-JSON body.
        Malformed,
    }

    /// One request the double saw, for assertions.
    #[derive(Debug, Clone)]
    pub struct CapturedRequest {
        pub method: String,
        pub path: String,
        pub authorization: Option<String>,
        pub body: Option<serde_json::Value>,
    }

    pub struct CannedCqmServer {
        /// Base URL to hand to a client config.
        pub url: String,
        requests: Arc<Mutex<Vec<CapturedRequest>>>,
        shutdown: Arc<AtomicBool>,
        address: std::net::SocketAddr,
        handle: Option<JoinHandle<()>>,
    }

    impl CannedCqmServer {
        pub fn spawn(script: ServerScript) -> std::io::Result<Self> {
            let listener = TcpListener::bind("127.0.0.1:0")?;
            let address = listener.local_addr()?;
            let requests = Arc::new(Mutex::new(Vec::new()));
            let shutdown = Arc::new(AtomicBool::new(false));
            let thread_requests = Arc::clone(&requests);
            let thread_shutdown = Arc::clone(&shutdown);
            let handle = std::thread::spawn(move || {
                serve(listener, script, thread_requests, thread_shutdown);
            });
            Ok(CannedCqmServer {
                url: format!("http://{address}"),
                requests,
                shutdown,
                address,
                handle: Some(handle),
            })
        }

        /// Everything the double has served so far.
        pub fn requests(&self) -> Vec<CapturedRequest> {
            self.requests.lock().expect("double poisoned").clone()
        }
    }

    impl Drop for CannedCqmServer {
        fn drop(&mut self) {
            self.shutdown.store(true, Ordering::SeqCst);
            // Unblock the accept loop.
            let _ = TcpStream::connect(self.address);
            if let Some(handle) = self.handle.take() {
                let _ = handle.join();
            }
        }
    }

    fn serve(
        listener: TcpListener,
        script: ServerScript,
        requests: Arc<Mutex<Vec<CapturedRequest>>>,
        shutdown: Arc<AtomicBool>,
    ) {
        let mut polls_seen = 0usize;
        for stream in listener.incoming() {
            if shutdown.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
            let Some(request) = read_request(&stream) else { continue };
            let response = respond(&script, &request, &mut polls_seen);
            requests.lock().expect("double poisoned").push(request);
            let _ = write_response(&stream, &response);
        }
    }

    enum Reply {
        Json(u16, serde_json::Value),
        Raw(u16, String),
    }

    fn respond(script: &ServerScript, request: &CapturedRequest, polls_seen: &mut usize) -> Reply {
        match script {
            ServerScript::RejectAuth => Reply::Json(
                401,
                serde_json::json!({ "message": "credential rejected" }),
            ),
            ServerScript::Malformed => Reply::Raw(200, "not json {{{".to_string()),
            ServerScript::Infeasible { message } => {
                if request.method == "POST" {
                    Reply::Json(
                        200,
                        serde_json::json!({ "job_id": "job-1", "status": "pending" }),
                    )
                } else {
                    Reply::Json(
                        200,
                        serde_json::json!({ "status": "infeasible", "message": message }),
                    )
                }
            }
            ServerScript::CompleteAfter { pending_polls, sample, energy } => {
                if request.method == "POST" {
                    Reply::Json(
                        200,
                        serde_json::json!({ "job_id": "job-1", "status": "pending" }),
                    )
                } else if *polls_seen < *pending_polls {
                    *polls_seen += 1;
                    Reply::Json(200, serde_json::json!({ "status": "pending" }))
                } else {
                    Reply::Json(
                        200,
                        serde_json::json!({
                            "status": "completed",
                            "sample": sample,
                            "energy": energy,
                        }),
                    )
                }
            }
        }
    }

    fn read_request(stream: &TcpStream) -> Option<CapturedRequest> {
        let mut reader = BufReader::new(stream);
        let mut request_line = String::new();
        if reader.read_line(&mut request_line).ok()? == 0 {
            return None;
        }
        let mut parts = request_line.split_whitespace();
        let method = parts.next()?.to_string();
        let path = parts.next()?.to_string();

        let mut content_length = 0usize;
        let mut authorization = None;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).ok()?;
            let line = line.trim_end();
            if line.is_empty() {
                break;
            }
            if let Some((name, value)) = line.split_once(':') {
                let name = name.trim().to_ascii_lowercase();
                let value = value.trim();
                if name == "content-length" {
                    content_length = value.parse().ok()?;
                } else if name == "authorization" {
                    authorization = Some(value.to_string());
                }
            }
        }
        let body = if content_length > 0 {
            let mut raw = vec![0u8; content_length];
            reader.read_exact(&mut raw).ok()?;
            serde_json::from_slice(&raw).ok()
        } else {
            None
        };
        Some(CapturedRequest { method, path, authorization, body })
    }

    fn write_response(mut stream: &TcpStream, reply: &Reply) -> std::io::Result<()> {
        let (status, reason, body) = match reply {
            Reply::Json(code, value) => (*code, reason_for(*code), value.to_string()),
            Reply::Raw(code, text) => (*code, reason_for(*code), text.clone()),
        };
        write!(
            stream,
            "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )?;
        stream.flush()
    }

    fn reason_for(code: u16) -> &'static str {
        match code {
            200 => "OK",
            401 => "Unauthorized",
            _ => "Status",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::double::{CannedCqmServer, ServerScript};
    use super::*;
    use crate::fixtures::two_route_fixture;
    use crate::network::LinkId;
    use crate::objective::score_plan;
    use crate::assign::UEParams;

    fn fast_config(url: &str, token: Option<&str>) -> CqmClientConfig {
        CqmClientConfig {
            endpoint: url.to_string(),
            token: token.map(str::to_string),
            timeout: Duration::from_secs(5),
            poll_interval: Duration::from_millis(5),
            max_polls: 50,
        }
    }

    #[test]
    fn payload_has_bounded_variables_and_budget_constraint() {
        let (net, dem, sc) = two_route_fixture();
        let payload = build_payload(&sc, &net, &dem, ObjectiveOptions::default()).unwrap();
        assert_eq!(payload.variables.len(), 2);
        assert_eq!(payload.variables[0].id, "x1");
        assert_eq!((payload.variables[0].lower, payload.variables[0].upper), (0.0, 1.5));
        assert_eq!(payload.variables[1].id, "x3");
        assert_eq!((payload.variables[1].lower, payload.variables[1].upper), (0.0, 8.0));

        assert_eq!(payload.constraints.len(), 1);
        let budget = &payload.constraints[0];
        assert_eq!(budget.sense, "le");
        assert_eq!(budget.rhs, 4.0);
        assert_eq!(budget.terms.len(), 2);
        assert!(budget.terms.values().all(|&w| w == 1.0));

        // The fit is exact at its three sample nodes.
        let ctx = EnergyContext::new(&net, &dem, &sc, ObjectiveOptions::default(), FitnessMode::Surrogate).unwrap();
        let mut scratch = ctx.scratch();
        let mut probe = vec![0.0; 2];
        let base = ctx.surrogate_breakdown(&probe, &mut scratch).unwrap().objective;
        for (k, d) in ctx.damaged.iter().enumerate() {
            let id = format!("x{}", d.id);
            let b = payload.objective.linear.get(&id).copied().unwrap_or(0.0);
            let c = payload
                .objective
                .quadratic
                .iter()
                .find(|t| t.u == id)
                .map(|t| t.coeff)
                .unwrap_or(0.0);
            for frac in [0.0, 0.5, 1.0] {
                let x = d.headroom * frac;
                probe[k] = x;
                let truth = ctx.surrogate_breakdown(&probe, &mut scratch).unwrap().objective;
                probe[k] = 0.0;
                let fitted = base + b * x + c * x * x;
                assert!((fitted - truth).abs() < 1e-9, "link {id} at {x}: {fitted} vs {truth}");
            }
        }

        // The document round-trips through its serialized form.
        let json = serde_json::to_string(&payload).unwrap();
        let back: CqmPayload = serde_json::from_str(&json).unwrap();
        assert_eq!(back, payload);
    }

    #[test]
    fn remote_solve_maps_sample_to_locally_scored_solution() {
        let (net, dem, sc) = two_route_fixture();
        let sample: BTreeMap<String, f64> =
            [("x1".to_string(), 1.0), ("x3".to_string(), 2.5)].into_iter().collect();
        let server = CannedCqmServer::spawn(ServerScript::CompleteAfter {
            pending_polls: 2,
            sample,
            energy: 0.25,
        })
        .unwrap();
        let client = CqmClient::new(fast_config(&server.url, Some("sekrit"))).unwrap();
        let solution = submit_cqm(&sc, &net, &dem, ObjectiveOptions::default(), &client).unwrap();

        assert_eq!(solution.solver, "cqm");
        assert_eq!(solution.plan.recovery(LinkId(1)), Some(1.0));
        assert_eq!(solution.plan.recovery(LinkId(3)), Some(2.5));
        assert!(solution.feasible);

        // Breakdown is recomputed locally, not trusted from the service.
        let (expected, _) = score_plan(
            &solution.plan,
            &sc,
            &net,
            &dem,
            &ObjectiveOptions::default(),
            &UEParams::from_scenario(&sc),
        )
        .unwrap();
        assert_eq!(solution.breakdown.hamiltonian, expected.hamiltonian);

        let seen = server.requests();
        assert!(seen.len() >= 4, "submit plus three polls, saw {}", seen.len());
        assert_eq!(seen[0].method, "POST");
        assert_eq!(seen[0].path, "/jobs");
        assert_eq!(seen[0].authorization.as_deref(), Some("Bearer sekrit"));
        let submitted: CqmPayload =
            serde_json::from_value(seen[0].body.clone().unwrap()).unwrap();
        let expected_payload = build_payload(&sc, &net, &dem, ObjectiveOptions::default()).unwrap();
        assert_eq!(submitted, expected_payload);
        assert_eq!(seen[1].method, "GET");
        assert_eq!(seen[1].path, "/jobs/job-1");
    }

    #[test]
    fn out_of_range_samples_are_clamped() {
        let (net, dem, sc) = two_route_fixture();
        let sample: BTreeMap<String, f64> =
            [("x1".to_string(), 99.0), ("x3".to_string(), -3.0)].into_iter().collect();
        let server = CannedCqmServer::spawn(ServerScript::CompleteAfter {
            pending_polls: 0,
            sample,
            energy: 0.0,
        })
        .unwrap();
        let client = CqmClient::new(fast_config(&server.url, None)).unwrap();
        let solution = submit_cqm(&sc, &net, &dem, ObjectiveOptions::default(), &client).unwrap();
        assert_eq!(solution.plan.recovery(LinkId(1)), Some(1.5));
        assert_eq!(solution.plan.recovery(LinkId(3)), Some(0.0));
    }

    #[test]
    fn error_taxonomy_distinguishes_auth_connection_infeasible_protocol() {
        let (net, dem, sc) = two_route_fixture();
        let payload = build_payload(&sc, &net, &dem, ObjectiveOptions::default()).unwrap();

        let auth_server = CannedCqmServer::spawn(ServerScript::RejectAuth).unwrap();
        let client = CqmClient::new(fast_config(&auth_server.url, Some("bad"))).unwrap();
        assert!(matches!(client.solve(&payload), Err(CqmError::Auth(_))));

        let infeasible = CannedCqmServer::spawn(ServerScript::Infeasible {
            message: "budget row conflicts with bounds".into(),
        })
        .unwrap();
        let client = CqmClient::new(fast_config(&infeasible.url, None)).unwrap();
        assert!(matches!(client.solve(&payload), Err(CqmError::Infeasible(_))));

        let malformed = CannedCqmServer::spawn(ServerScript::Malformed).unwrap();
        let client = CqmClient::new(fast_config(&malformed.url, None)).unwrap();
        assert!(matches!(client.solve(&payload), Err(CqmError::Protocol(_))));

        // Bind a port, then free it: nothing is listening there.
        let vacated = {
            let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
            listener.local_addr().unwrap()
        };
        let client = CqmClient::new(fast_config(&format!("http://{vacated}"), None)).unwrap();
        match client.solve(&payload) {
            Err(CqmError::Connection(_)) => {}
            other => panic!("expected connection error, got {other:?}"),
        }

        // A failed solve never yields a partial solution.
        let err = submit_cqm(&sc, &net, &dem, ObjectiveOptions::default(), &{
            CqmClient::new(fast_config(&format!("http://{vacated}"), None)).unwrap()
        });
        assert!(err.is_err());
    }
}
