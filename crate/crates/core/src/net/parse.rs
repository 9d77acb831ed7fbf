use super::{is_identifier, Net, NetBuilder, NetError};

/// Parses the line-oriented net format:
///
/// ```text
/// # comment
/// place <id>
/// trans <id>
/// arc <id> <id>     # direction follows from the node kinds
/// init <place-id>
/// ```
pub fn parse_net(text: &str) -> Result<Net, NetError> {
    let mut builder = NetBuilder::new();
    let mut arc_lines = Vec::new();
    let mut init_lines = Vec::new();
    let mut declared = std::collections::HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let words = split_words(line);
        let Some(&(kw_col, keyword)) = words.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| NetError::Syntax {
            line: lineno + 1,
            column: column + 1,
            message,
        };
        let arity = match keyword {
            "place" | "trans" | "init" => 1,
            "arc" => 2,
            other => return Err(syntax(kw_col, format!("unknown directive `{other}`"))),
        };
        if words.len() != arity + 1 {
            let col = words.get(arity + 1).map_or(line.len(), |w| w.0);
            return Err(syntax(
                col,
                format!("`{keyword}` takes {arity} identifier(s), found {}", words.len() - 1),
            ));
        }
        for &(col, w) in &words[1..] {
            if !is_identifier(w) {
                return Err(syntax(col, format!("`{w}` is not an identifier")));
            }
        }
        match keyword {
            "place" | "trans" => {
                let (col, id) = words[1];
                if !declared.insert(id.to_string()) {
                    return Err(syntax(col, format!("duplicate identifier `{id}`")));
                }
                if keyword == "place" {
                    builder.place(id);
                } else {
                    builder.transition(id);
                }
            }
            "arc" => arc_lines.push((lineno, words[1], words[2])),
            _ => init_lines.push((lineno, words[1])),
        }
    }

    // Arcs and initial tokens may appear before the declarations they use.
    for (lineno, (c1, a), (c2, b)) in arc_lines {
        for (col, id) in [(c1, a), (c2, b)] {
            if !declared.contains(id) {
                return Err(NetError::Syntax {
                    line: lineno + 1,
                    column: col + 1,
                    message: format!("arc endpoint `{id}` is not declared"),
                });
            }
        }
        builder.arc(a, b);
    }
    let mut marked = std::collections::HashSet::new();
    for (lineno, (col, p)) in init_lines {
        if !marked.insert(p) {
            return Err(NetError::Syntax {
                line: lineno + 1,
                column: col + 1,
                message: format!("place `{p}` is marked twice"),
            });
        }
        builder.mark(p);
    }
    builder.build()
}

fn split_words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::tests::RUNNING_EXAMPLE;

    #[test]
    fn running_example() {
        let net = parse_net(RUNNING_EXAMPLE).unwrap();
        assert_eq!(net.num_places(), 5);
        assert_eq!(net.num_transitions(), 5);
        assert_eq!(net.marking_names(net.initial_marking()), ["p1", "p2"]);
        let t2 = net.transition("t2").unwrap();
        let pre: Vec<_> = net.preset(t2).iter().map(|p| net.place_name(*p)).collect();
        assert_eq!(pre, ["p1", "p2"]);
    }

    #[test]
    fn empty_preset_is_rejected() {
        let err = parse_net("place p\ntrans t\narc t p\n").unwrap_err();
        assert_eq!(err, NetError::EmptyPreset("t".into()));
        let err = parse_net("place p\ntrans t\narc p t\n").unwrap_err();
        assert_eq!(err, NetError::EmptyPostset("t".into()));
    }

    #[test]
    fn duplicate_place_reports_position() {
        let err = parse_net("place p1\nplace  p1\n").unwrap_err();
        assert_eq!(
            err,
            NetError::Syntax {
                line: 2,
                column: 8,
                message: "duplicate identifier `p1`".into()
            }
        );
    }

    #[test]
    fn undeclared_and_same_kind_arcs() {
        let err = parse_net("place p\ntrans t\narc p q\n").unwrap_err();
        assert!(matches!(err, NetError::Syntax { line: 3, column: 7, .. }), "{err}");
        let err = parse_net("place p\nplace q\ntrans t\narc p t\narc t q\narc p q\n").unwrap_err();
        assert_eq!(err, NetError::SameKindArc("p".into(), "q".into()));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_net("plaice p\n"),
            Err(NetError::Syntax { line: 1, column: 1, .. })
        ));
        assert!(matches!(
            parse_net("place 1p\n"),
            Err(NetError::Syntax { line: 1, column: 7, .. })
        ));
        assert!(matches!(
            parse_net("arc a\n"),
            Err(NetError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_forward_references() {
        let net = parse_net("arc p t # early\narc t q\ninit p\nplace p\nplace q\ntrans t\n").unwrap();
        assert_eq!(net.num_arcs(), 2);
        assert_eq!(net.marking_names(net.initial_marking()), ["p"]);
    }
}
