"""Tokenizer for the supported Verilog subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from alice.errors import SourceLoc, UnsupportedConstruct, VerilogSyntaxError

KEYWORDS = frozenset({
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "signed",
    "assign", "always", "posedge", "negedge", "or", "begin", "end", "if", "else",
    "case", "casez", "casex", "endcase", "default",
})

# Recognised but outside the subset; hitting one is a hard error naming the construct.
UNSUPPORTED_KEYWORDS = {
    "parameter": "parameter", "localparam": "localparam", "defparam": "defparam",
    "generate": "generate", "endgenerate": "generate", "genvar": "genvar",
    "function": "function", "endfunction": "function", "task": "task", "endtask": "task",
    "initial": "initial block", "integer": "integer declaration", "real": "real declaration",
    "time": "time declaration", "realtime": "realtime declaration",
    "for": "for loop", "while": "while loop", "repeat": "repeat loop", "forever": "forever loop",
    "fork": "fork/join", "specify": "specify block", "primitive": "user-defined primitive",
    "tri": "tri net", "wand": "wand net", "wor": "wor net", "supply0": "supply net",
    "supply1": "supply net", "trireg": "trireg net", "event": "event declaration",
    "and": "gate primitive", "nand": "gate primitive", "nor": "gate primitive",
    "xor": "gate primitive", "xnor": "gate primitive", "not": "gate primitive",
    "buf": "gate primitive", "bufif0": "gate primitive", "bufif1": "gate primitive",
    "notif0": "gate primitive", "notif1": "gate primitive", "tran": "gate primitive",
    "deassign": "procedural continuous assignment", "force": "force", "release": "release",
    "wait": "wait statement", "disable": "disable statement",
}

OPERATORS = sorted([
    "<<<", ">>>", "===", "!==",
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "~&", "~|", "~^", "^~", "**", "+:", "-:",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "?", ":", "=",
    "(", ")", "[", "]", "{", "}", ",", ";", ".", "@", "#",
], key=len, reverse=True)

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<line_comment>//[^\n]*)"
    r"|(?P<block_comment>/\*.*?\*/)"
    r"|(?P<num>(?:[0-9][0-9_]*)?\s*'[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ_?]+|[0-9][0-9_]*)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_$]*)"
    r"|(?P<op>" + "|".join(re.escape(op) for op in OPERATORS) + ")",
    re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # id, kw, num, op, eof
    text: str
    loc: SourceLoc


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line_starts = [0]
    for m in re.finditer("\n", source):
        line_starts.append(m.end())

    def loc_at(offset: int) -> SourceLoc:
        lo, hi = 0, len(line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return SourceLoc(filename, lo + 1, offset - line_starts[lo] + 1)

    pos = 0
    while pos < len(source):
        ch = source[pos]
        if ch == "`":
            directive = re.match(r"`\w*", source[pos:]).group(0)
            raise UnsupportedConstruct(f"compiler directive {directive}", loc_at(pos))
        if ch == "$":
            name = re.match(r"\$\w*", source[pos:]).group(0)
            raise UnsupportedConstruct(f"system task {name}", loc_at(pos))
        if ch == "\\":
            raise UnsupportedConstruct("escaped identifier", loc_at(pos))
        if ch == '"':
            raise UnsupportedConstruct("string literal", loc_at(pos))
        if source.startswith("/*", pos) and "*/" not in source[pos + 2:]:
            raise VerilogSyntaxError("'*/'", "end of input", loc_at(pos))
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise VerilogSyntaxError("a token", ch, loc_at(pos))
        kind = m.lastgroup
        text = m.group(0)
        if kind == "id":
            if text in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstruct(UNSUPPORTED_KEYWORDS[text], loc_at(pos))
            tokens.append(Token("kw" if text in KEYWORDS else "id", text, loc_at(pos)))
        elif kind == "num":
            tokens.append(Token("num", re.sub(r"\s+", "", text), loc_at(pos)))
        elif kind == "op":
            tokens.append(Token("op", text, loc_at(pos)))
        pos = m.end()
    tokens.append(Token("eof", "", loc_at(len(source))))
    return tokens
