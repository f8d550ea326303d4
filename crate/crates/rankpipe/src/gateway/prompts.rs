//! Prompt templates with `{placeholder}` substitution.
//!
//! Canonical templates ship with the crate and can be overridden from a
//! directory of TOML files, so experiments can vary prompt text without code
//! changes.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::{Message, Role};
use rankpipe_core::text::truncate_to_budget;

const PLACEHOLDERS: &[&str] = &["query", "document", "relevance_definition", "answer", "linked_docs", "output"];

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("placeholder {{{0}}} is unbound")]
    Unbound(String),
    #[error("required input {0} is empty")]
    EmptyInput(&'static str),
    #[error("failed to load template {path}: {reason}")]
    Load { path: String, reason: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub system: String,
    pub user: String,
}

fn substitute(text: &str, bindings: &[(&str, &str)]) -> Result<String, PromptError> {
    let mut out = text.to_string();
    for (key, value) in bindings {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    for ph in PLACEHOLDERS {
        if out.contains(&format!("{{{ph}}}")) {
            return Err(PromptError::Unbound(ph.to_string()));
        }
    }
    Ok(out)
}

impl PromptTemplate {
    pub fn render(&self, bindings: &[(&str, &str)]) -> Result<Vec<Message>, PromptError> {
        Ok(vec![
            Message { role: Role::System, content: substitute(&self.system, bindings)? },
            Message { role: Role::User, content: substitute(&self.user, bindings)? },
        ])
    }
}

#[derive(Debug, Clone)]
pub struct PromptLibrary {
    pub rerank: PromptTemplate,
    pub teacher: PromptTemplate,
    pub related_queries: PromptTemplate,
    pub reward: PromptTemplate,
}

fn parse_template(name: &str, content: &str) -> Result<PromptTemplate, PromptError> {
    toml::from_str(content).map_err(|e| PromptError::Load {
        path: name.to_string(),
        reason: e.to_string(),
    })
}

impl Default for PromptLibrary {
    fn default() -> Self {
        Self {
            rerank: parse_template("rerank", include_str!("../../templates/rerank.toml")).unwrap(),
            teacher: parse_template("teacher", include_str!("../../templates/teacher.toml")).unwrap(),
            related_queries: parse_template(
                "related_queries",
                include_str!("../../templates/related_queries.toml"),
            )
            .unwrap(),
            reward: parse_template("reward", include_str!("../../templates/reward.toml")).unwrap(),
        }
    }
}

impl PromptLibrary {
    /// Loads `<name>.toml` files from a directory, falling back to the
    /// built-in text for any missing template.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let load = |name: &str, fallback: &PromptTemplate| -> Result<PromptTemplate, PromptError> {
            let path = dir.join(format!("{name}.toml"));
            if !path.exists() {
                return Ok(fallback.clone());
            }
            let content = std::fs::read_to_string(&path).map_err(|e| PromptError::Load {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            parse_template(name, &content)
        };
        let defaults = Self::default();
        Ok(Self {
            rerank: load("rerank", &defaults.rerank)?,
            teacher: load("teacher", &defaults.teacher)?,
            related_queries: load("related_queries", &defaults.related_queries)?,
            reward: load("reward", &defaults.reward)?,
        })
    }

    /// Rerank prompt: instructs step-by-step analysis ending in a
    /// `Relevance: <0|1|2>` line. An optional domain relevance definition is
    /// injected into the system text; the document is truncated to the token
    /// budget first.
    pub fn render_rerank_prompt(
        &self,
        query: &str,
        document: &str,
        relevance_definition: Option<&str>,
        budget_tokens: usize,
    ) -> Result<Vec<Message>, PromptError> {
        if query.trim().is_empty() {
            return Err(PromptError::EmptyInput("query"));
        }
        if document.trim().is_empty() {
            return Err(PromptError::EmptyInput("document"));
        }
        let doc = truncate_to_budget(document, budget_tokens);
        self.rerank.render(&[
            ("query", query),
            ("document", &doc),
            ("relevance_definition", relevance_definition.unwrap_or("")),
        ])
    }

    /// Teacher annotation prompt; same output format contract as the rerank
    /// prompt.
    pub fn render_teacher_prompt(
        &self,
        query: &str,
        document: &str,
        budget_tokens: usize,
    ) -> Result<Vec<Message>, PromptError> {
        if query.trim().is_empty() {
            return Err(PromptError::EmptyInput("query"));
        }
        if document.trim().is_empty() {
            return Err(PromptError::EmptyInput("document"));
        }
        let doc = truncate_to_budget(document, budget_tokens);
        self.teacher.render(&[("query", query), ("document", &doc)])
    }

    /// Related-queries prompt; the downstream parser expects one query per
    /// numbered line. An empty `linked_docs` omits the docs section.
    pub fn render_related_queries_prompt(
        &self,
        query: &str,
        answer: &str,
        linked_docs: &[String],
        budget_tokens: usize,
    ) -> Result<Vec<Message>, PromptError> {
        if query.trim().is_empty() {
            return Err(PromptError::EmptyInput("query"));
        }
        if answer.trim().is_empty() {
            return Err(PromptError::EmptyInput("answer"));
        }
        let docs_section = if linked_docs.is_empty() {
            String::new()
        } else {
            let snippets: Vec<String> = linked_docs
                .iter()
                .map(|d| format!("- {}", truncate_to_budget(d, 100)))
                .collect();
            format!("\nLinked documents:\n{}\n", snippets.join("\n"))
        };
        self.related_queries.render(&[
            ("query", query),
            ("answer", &truncate_to_budget(answer, budget_tokens)),
            ("linked_docs", &docs_section),
        ])
    }

    /// Formats (query, document, output) for the chat-based reward adapter.
    pub fn render_reward_prompt(
        &self,
        query: &str,
        document: &str,
        output: &str,
        budget_tokens: usize,
    ) -> Result<Vec<Message>, PromptError> {
        self.reward.render(&[
            ("query", query),
            ("document", &truncate_to_budget(document, budget_tokens)),
            ("output", output),
        ])
    }
}
