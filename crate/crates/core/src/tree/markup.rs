//! A restricted tag-only markup reader for web container contents.
//!
//! Only element structure matters: open, close and self-closing tags are
//! recognized; attributes, text, comments and `<!...>` declarations are
//! skipped. Void elements must be written self-closing (`<br/>`).

use thiserror::Error;

use super::ViewNode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("byte {position}: {message}")]
pub struct MarkupError {
    pub position: usize,
    pub message: String,
}

impl MarkupError {
    fn at(position: usize, message: impl Into<String>) -> Self {
        MarkupError {
            position,
            message: message.into(),
        }
    }
}

struct Open {
    name: String,
    position: usize,
    children: Vec<ViewNode>,
}

fn is_name_start(b: u8) -> bool {
    b.is_ascii_alphabetic()
}

fn is_name_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b':' | b'.')
}

/// Parses `markup` into the element forest it describes.
pub fn parse_web_markup(markup: &str) -> Result<Vec<ViewNode>, MarkupError> {
    let bytes = markup.as_bytes();
    let mut roots = Vec::new();
    let mut stack: Vec<Open> = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let start = i;
        if markup[i..].starts_with("<!--") {
            let end = markup[i + 4..]
                .find("-->")
                .ok_or_else(|| MarkupError::at(start, "unterminated comment"))?;
            i += 4 + end + 3;
            continue;
        }
        if markup[i..].starts_with("<!") || markup[i..].starts_with("<?") {
            let end = markup[i..]
                .find('>')
                .ok_or_else(|| MarkupError::at(start, "unterminated declaration"))?;
            i += end + 1;
            continue;
        }

        let closing = bytes.get(i + 1) == Some(&b'/');
        let name_start = i + 1 + usize::from(closing);
        if !bytes.get(name_start).copied().is_some_and(is_name_start) {
            return Err(MarkupError::at(start, "expected a tag name after `<`"));
        }
        let mut j = name_start;
        while j < bytes.len() && is_name_char(bytes[j]) {
            j += 1;
        }
        let name = &markup[name_start..j];

        // Skip attributes up to the closing `>`, honoring quotes.
        let mut quote = None;
        let mut last_significant = None;
        loop {
            let Some(&b) = bytes.get(j) else {
                return Err(MarkupError::at(start, format!("unterminated tag <{name}")));
            };
            match (quote, b) {
                (Some(q), _) if b == q => quote = None,
                (Some(_), _) => {}
                (None, b'"' | b'\'') => quote = Some(b),
                (None, b'>') => break,
                (None, b'<') => {
                    return Err(MarkupError::at(j, format!("`<` inside tag <{name}")));
                }
                (None, _) if !b.is_ascii_whitespace() => last_significant = Some(b),
                _ => {}
            }
            j += 1;
        }
        let self_closing = last_significant == Some(b'/');
        i = j + 1;

        if closing {
            if self_closing {
                return Err(MarkupError::at(start, format!("malformed closing tag </{name}/>")));
            }
            let Some(open) = stack.pop() else {
                return Err(MarkupError::at(start, format!("unexpected closing tag </{name}>")));
            };
            if open.name != name {
                return Err(MarkupError::at(
                    start,
                    format!(
                        "closing tag </{name}> does not match <{}> opened at byte {}",
                        open.name, open.position
                    ),
                ));
            }
            let node = ViewNode::new(open.name, open.children);
            match stack.last_mut() {
                Some(parent) => parent.children.push(node),
                None => roots.push(node),
            }
        } else if self_closing {
            let node = ViewNode::leaf(name);
            match stack.last_mut() {
                Some(parent) => parent.children.push(node),
                None => roots.push(node),
            }
        } else {
            stack.push(Open {
                name: name.to_string(),
                position: start,
                children: Vec::new(),
            });
        }
    }

    if let Some(open) = stack.pop() {
        return Err(MarkupError::at(open.position, format!("unclosed tag <{}>", open.name)));
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_elements() {
        let nodes = parse_web_markup("<div><p/><p/></div>").unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].tag(), "div");
        let kids: Vec<_> = nodes[0].children().iter().map(|c| c.tag()).collect();
        assert_eq!(kids, ["p", "p"]);
    }

    #[test]
    fn empty_markup_is_empty_forest() {
        assert!(parse_web_markup("").unwrap().is_empty());
        assert!(parse_web_markup("just text").unwrap().is_empty());
    }

    #[test]
    fn crossing_close_tags_are_rejected() {
        let err = parse_web_markup("<a><b></a></b>").unwrap_err();
        assert_eq!(err.position, 6);
        assert!(err.message.contains("</a>"), "{err}");
    }

    #[test]
    fn attributes_text_and_comments_are_ignored() {
        let nodes = parse_web_markup(
            r#"<!DOCTYPE html><!-- hi --><ul class="a>b"><li id='x'>one</li> <li>two</li></ul>"#,
        )
        .unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].children().len(), 2);
    }

    #[test]
    fn unclosed_and_stray_tags() {
        assert_eq!(parse_web_markup("<a><b/>").unwrap_err().position, 0);
        assert!(parse_web_markup("</a>").is_err());
        assert!(parse_web_markup("<a").is_err());
        assert!(parse_web_markup("< a/>").is_err());
    }
}
