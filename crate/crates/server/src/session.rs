use axum::extract::Request;
use axum::http::header::{COOKIE, SET_COOKIE};
use axum::http::{HeaderMap, HeaderValue};
use axum::middleware::Next;
use axum::response::Response;

pub const SESSION_HEADER: &str = "x-session-token";
pub const SESSION_COOKIE: &str = "unfun_session";

/// The anonymous player behind a request. The player id is a hash of the
/// secret token, so ids can be shown publicly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub player_id: String,
}

impl Session {
    pub fn from_token(token: &str) -> Self {
        Session {
            player_id: unfun_store::content_id(&["session", token]),
        }
    }
}

fn valid_token(token: &str) -> bool {
    (1..=128).contains(&token.len()) && token.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn token_from(headers: &HeaderMap) -> Option<String> {
    let from_header = headers
        .get(SESSION_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|t| valid_token(t));
    if let Some(t) = from_header {
        return Some(t.to_string());
    }
    headers
        .get_all(COOKIE)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(';'))
        .filter_map(|pair| pair.trim().split_once('='))
        .find(|(name, value)| *name == SESSION_COOKIE && valid_token(value))
        .map(|(_, value)| value.to_string())
}

fn new_token() -> String {
    format!("{:032x}", rand::random::<u128>())
}

/// Attaches a [`Session`] to every request, issuing a token (returned in
/// both a header and a cookie) when the client has none.
pub async fn session_layer(mut request: Request, next: Next) -> Response {
    let (token, fresh) = match token_from(request.headers()) {
        Some(t) => (t, false),
        None => (new_token(), true),
    };
    request.extensions_mut().insert(Session::from_token(&token));
    let mut response = next.run(request).await;
    if fresh {
        let headers = response.headers_mut();
        if let Ok(v) = HeaderValue::from_str(&token) {
            headers.insert(SESSION_HEADER, v);
        }
        if let Ok(v) = HeaderValue::from_str(&format!("{SESSION_COOKIE}={token}; Path=/; HttpOnly; SameSite=Lax")) {
            headers.append(SET_COOKIE, v);
        }
    }
    response
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_wins_over_cookie() {
        let mut h = HeaderMap::new();
        h.insert(COOKIE, HeaderValue::from_static("a=b; unfun_session=fromcookie"));
        assert_eq!(token_from(&h).as_deref(), Some("fromcookie"));
        h.insert(SESSION_HEADER, HeaderValue::from_static("fromheader"));
        assert_eq!(token_from(&h).as_deref(), Some("fromheader"));
    }

    #[test]
    fn malformed_tokens_are_ignored() {
        let mut h = HeaderMap::new();
        h.insert(SESSION_HEADER, HeaderValue::from_static("has space"));
        assert_eq!(token_from(&h), None);
        assert!(valid_token(&new_token()));
        assert_ne!(new_token(), new_token());
    }
}
