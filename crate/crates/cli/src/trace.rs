//! Escaping for action-trace output. Matched bytes render inside double
//! quotes: printable ASCII stays literal (with `"` and `\` escaped), tab,
//! newline, and carriage return use their short escapes, everything else is
//! `\xNN`.

pub fn escape_bytes(bytes: &[u8]) -> String {
    let mut out = String::new();
    for &b in bytes {
        match b {
            b'"' => out.push_str("\\\""),
            b'\\' => out.push_str("\\\\"),
            b'\t' => out.push_str("\\t"),
            b'\n' => out.push_str("\\n"),
            b'\r' => out.push_str("\\r"),
            0x20..=0x7e => out.push(b as char),
            other => out.push_str(&format!("\\x{other:02x}")),
        }
    }
    out
}
