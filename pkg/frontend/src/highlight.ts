// Minimal rendering of stem/choice text: fenced code blocks become
// highlighted <pre><code> blocks, everything else stays escaped plain text.

const PYTHON_KEYWORDS = new Set([
  "and", "as", "assert", "break", "class", "continue", "def", "del", "elif",
  "else", "except", "finally", "for", "from", "global", "if", "import", "in",
  "is", "lambda", "None", "not", "or", "pass", "raise", "return", "True",
  "False", "try", "while", "with", "yield", "print",
]);

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function highlightCode(code: string): string {
  return escapeHtml(code)
    .replace(/\b[A-Za-z_][A-Za-z0-9_]*\b/g, (word) =>
      PYTHON_KEYWORDS.has(word) ? `<span class="kw">${word}</span>` : word,
    )
    .replace(/(&quot;.*?&quot;|'[^']*')/g, '<span class="str">$1</span>')
    .replace(/(^|[^\w&])#(?![0-9a-fA-F]{3})(.*)$/gm, '$1<span class="comment">#$2</span>');
}

const FENCE = /```[^\n]*\n([\s\S]*?)```/g;

export function renderRichText(text: string): string {
  let html = "";
  let cursor = 0;
  for (const match of text.matchAll(FENCE)) {
    const start = match.index ?? 0;
    if (start > cursor) {
      html += `<p>${escapeHtml(text.slice(cursor, start)).replace(/\n/g, "<br>")}</p>`;
    }
    html += `<pre class="code"><code>${highlightCode(match[1].replace(/\n$/, ""))}</code></pre>`;
    cursor = start + match[0].length;
  }
  if (cursor < text.length) {
    html += `<p>${escapeHtml(text.slice(cursor)).replace(/\n/g, "<br>")}</p>`;
  }
  return html;
}
