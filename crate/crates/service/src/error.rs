use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use sqmeter_core::ErrorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    Validation,
    Conflict,
    NotFound,
    State,
    Internal,
}

impl ApiErrorCode {
    pub const ALL: [ApiErrorCode; 5] = [
        ApiErrorCode::Validation,
        ApiErrorCode::Conflict,
        ApiErrorCode::NotFound,
        ApiErrorCode::State,
        ApiErrorCode::Internal,
    ];

    pub fn status(self) -> StatusCode {
        match self {
            ApiErrorCode::Validation => StatusCode::UNPROCESSABLE_ENTITY,
            ApiErrorCode::Conflict => StatusCode::CONFLICT,
            ApiErrorCode::NotFound => StatusCode::NOT_FOUND,
            ApiErrorCode::State => StatusCode::CONFLICT,
            ApiErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<ErrorKind> for ApiErrorCode {
    fn from(kind: ErrorKind) -> Self {
        match kind {
            ErrorKind::Validation => ApiErrorCode::Validation,
            ErrorKind::Conflict => ApiErrorCode::Conflict,
            ErrorKind::NotFound => ApiErrorCode::NotFound,
            ErrorKind::State => ApiErrorCode::State,
            ErrorKind::Internal => ApiErrorCode::Internal,
        }
    }
}

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{code:?}: {message}")]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(code: ApiErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            field: None,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ApiErrorCode::Validation, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(ApiErrorCode::NotFound, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ApiErrorCode::Internal, message)
    }

    pub fn with_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_owned());
        self
    }
}

impl From<sqmeter_core::Error> for ApiError {
    fn from(err: sqmeter_core::Error) -> Self {
        let code = ApiErrorCode::from(err.kind());
        // Internal details (paths, hashing failures) stay in the logs.
        let message = if code == ApiErrorCode::Internal {
            tracing::error!(error = %err, "internal error");
            "internal error".to_owned()
        } else {
            err.to_string()
        };
        ApiError {
            code,
            message,
            field: err.field().map(str::to_owned),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        let expected = [422, 409, 404, 409, 500];
        for (code, status) in ApiErrorCode::ALL.into_iter().zip(expected) {
            assert_eq!(code.status().as_u16(), status, "{code:?}");
        }
    }

    #[test]
    fn core_errors_map_by_kind() {
        let e: ApiError = sqmeter_core::Error::Incomplete { slots: vec![5] }.into();
        assert_eq!(e.code, ApiErrorCode::State);
        assert!(e.message.contains('5'));
        let e: ApiError = sqmeter_core::Error::validation_field("answer", "empty").into();
        assert_eq!((e.code, e.field.as_deref()), (ApiErrorCode::Validation, Some("answer")));
        let e: ApiError = sqmeter_core::Error::Hash("boom /secret/path".into()).into();
        assert_eq!(e.code, ApiErrorCode::Internal);
        assert!(!e.message.contains("secret"));
    }

    #[test]
    fn wire_format() {
        let e = ApiError::new(ApiErrorCode::NotFound, "x");
        assert_eq!(
            serde_json::to_value(&e).unwrap(),
            serde_json::json!({"code": "not_found", "message": "x", "field": null})
        );
    }
}
