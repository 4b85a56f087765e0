//! English and Spanish message catalogs, selected with `SONOWORK_LANG`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lang {
    En,
    Es,
}

impl Lang {
    /// `es`, `es_AR.UTF-8`, … select Spanish; anything else English.
    pub fn from_env() -> Self {
        Self::parse(std::env::var("SONOWORK_LANG").ok().as_deref())
    }

    pub fn parse(value: Option<&str>) -> Self {
        match value {
            Some(v) if v.to_ascii_lowercase().starts_with("es") => Lang::Es,
            _ => Lang::En,
        }
    }
}

const EN: &[(&str, &str)] = &[
    ("error", "error"),
    ("read_failed", "cannot read {path}: {reason}"),
    ("write_failed", "cannot write {path}: {reason}"),
    ("parse_failed", "cannot parse {path}: {reason}"),
    ("invalid_config", "invalid sound settings: {reason}"),
    ("step_failed", "transform step {step} failed: {reason}"),
    ("render_failed", "rendering failed: {reason}"),
    ("session_failed", "training session failed: {reason}"),
    ("sonify_summary", "{points} points, {duration} s, {fmin}-{fmax} Hz"),
    ("sonify_silent", "{points} points, {duration} s, silent (no finite values)"),
    ("events_summary", "{events} events, {duration} s"),
    ("transform_summary", "{rows} rows written to {path}"),
    ("plot_written", "plot written to {path}"),
];

const ES: &[(&str, &str)] = &[
    ("error", "error"),
    ("read_failed", "no se puede leer {path}: {reason}"),
    ("write_failed", "no se puede escribir {path}: {reason}"),
    ("parse_failed", "no se puede interpretar {path}: {reason}"),
    ("invalid_config", "configuración de sonido inválida: {reason}"),
    ("step_failed", "falló el paso {step} de la transformación: {reason}"),
    ("render_failed", "falló la generación: {reason}"),
    ("session_failed", "falló la sesión de entrenamiento: {reason}"),
    ("sonify_summary", "{points} puntos, {duration} s, {fmin}-{fmax} Hz"),
    ("sonify_silent", "{points} puntos, {duration} s, silencio (sin valores finitos)"),
    ("events_summary", "{events} eventos, {duration} s"),
    ("transform_summary", "{rows} filas escritas en {path}"),
    ("plot_written", "gráfico escrito en {path}"),
];

fn catalog(lang: Lang) -> &'static [(&'static str, &'static str)] {
    match lang {
        Lang::En => EN,
        Lang::Es => ES,
    }
}

/// Looks up `key` and fills `{name}` placeholders from `args`.
pub fn tr(lang: Lang, key: &str, args: &[(&str, &dyn std::fmt::Display)]) -> String {
    let template = catalog(lang)
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, t)| *t)
        .unwrap_or(key);
    args.iter().fold(template.to_string(), |text, (name, value)| {
        text.replace(&format!("{{{name}}}"), &value.to_string())
    })
}
