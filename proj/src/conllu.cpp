#include "rdgcn/conllu.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdgcn/error.hpp"

namespace rdgcn {

namespace {

using nlohmann::json;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

// Multiword range lines ("3-4") and empty nodes ("8.1") carry no tree
// structure of their own and are skipped rather than expanded.
bool is_range_id(std::string_view id) {
    auto dash = id.find('-');
    if (dash == std::string_view::npos) return false;
    return all_digits(id.substr(0, dash)) && all_digits(id.substr(dash + 1));
}

bool is_empty_node_id(std::string_view id) {
    auto dot = id.find('.');
    if (dot == std::string_view::npos) return false;
    return all_digits(id.substr(0, dot)) && all_digits(id.substr(dot + 1));
}

int parse_int(std::string_view s, int line_no, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                         std::string(s) + "'");
    }
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

void finish_sentence(std::vector<DepTree>& out, DepTree& current, int first_line) {
    if (current.tokens.empty()) return;
    const int n = current.size();
    for (const Token& tok : current.tokens) {
        if (tok.head < 0 || tok.head > n) {
            throw InputError("sentence " + std::to_string(out.size() + 1) + " (line " +
                             std::to_string(first_line) + "): HEAD " + std::to_string(tok.head) +
                             " of token " + std::to_string(tok.index) + " out of range [0, " +
                             std::to_string(n) + "]");
        }
    }
    if (auto violation = validate_tree(current)) {
        throw InputError("sentence " + std::to_string(out.size() + 1) + " (line " +
                         std::to_string(first_line) + "): " + to_string(violation->kind) +
                         (violation->detail.empty() ? "" : " (" + violation->detail + ")"));
    }
    out.push_back(std::move(current));
    current = DepTree{};
}

}  // namespace

const char* to_string(TreeViolationKind kind) {
    switch (kind) {
        case TreeViolationKind::HeadOutOfRange: return "head out of range";
        case TreeViolationKind::MultipleRoots: return "multiple roots";
        case TreeViolationKind::Cycle: return "cycle";
    }
    return "unknown";
}

std::optional<TreeViolation> validate_tree(const DepTree& tree) {
    const int n = tree.size();
    for (const Token& tok : tree.tokens) {
        if (tok.head < 0 || tok.head > n) {
            return TreeViolation{TreeViolationKind::HeadOutOfRange,
                                 "token " + std::to_string(tok.index)};
        }
        if (tok.head == tok.index) {
            return TreeViolation{TreeViolationKind::Cycle,
                                 "token " + std::to_string(tok.index) + " governs itself"};
        }
    }
    int root = 0;
    for (const Token& tok : tree.tokens) {
        if (tok.head == 0) {
            if (root != 0) {
                return TreeViolation{TreeViolationKind::MultipleRoots,
                                     "tokens " + std::to_string(root) + " and " +
                                         std::to_string(tok.index)};
            }
            root = tok.index;
        }
    }
    if (n > 0 && root == 0) {
        // Every token has an in-range non-zero head, so following parents
        // from any token must eventually revisit a token.
        return TreeViolation{TreeViolationKind::Cycle, "no token is governed by ROOT"};
    }
    // With exactly one root and one parent per remaining token, any token
    // that cannot reach the root by following heads sits on a cycle.
    for (const Token& tok : tree.tokens) {
        int cur = tok.index;
        int steps = 0;
        while (cur != 0 && steps <= n) {
            cur = tree.tokens[cur - 1].head;
            ++steps;
        }
        if (cur != 0) {
            return TreeViolation{TreeViolationKind::Cycle,
                                 "token " + std::to_string(tok.index) + " cannot reach the root"};
        }
    }
    return std::nullopt;
}

std::vector<DepTree> parse_conllu(std::string_view text) {
    std::vector<DepTree> out;
    DepTree current;
    int line_no = 0;
    int sentence_first_line = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;

        if (line.empty()) {
            finish_sentence(out, current, sentence_first_line);
        } else if (line.front() != '#') {
            auto fields = split_tabs(line);
            if (fields.size() != 10) {
                throw InputError("line " + std::to_string(line_no) +
                                 ": expected 10 tab-separated columns, got " +
                                 std::to_string(fields.size()));
            }
            if (!is_range_id(fields[0]) && !is_empty_node_id(fields[0])) {
                if (current.tokens.empty()) sentence_first_line = line_no;
                Token tok;
                tok.index = parse_int(fields[0], line_no, "ID");
                if (tok.index != current.size() + 1) {
                    throw InputError("line " + std::to_string(line_no) + ": token ID " +
                                     std::to_string(tok.index) + " breaks the 1..N sequence");
                }
                tok.form = std::string(fields[1]);
                tok.head = parse_int(fields[6], line_no, "HEAD");
                tok.deprel = std::string(fields[7]);
                current.tokens.push_back(std::move(tok));
            }
        }

        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    finish_sentence(out, current, sentence_first_line);
    return out;
}

std::string serialize_conllu(const DepTree& tree) {
    std::ostringstream out;
    for (const Token& tok : tree.tokens) {
        out << tok.index << '\t' << tok.form << "\t_\t_\t_\t_\t" << tok.head << '\t' << tok.deprel
            << "\t_\t_\n";
    }
    out << '\n';
    return out.str();
}

int polarity_id(std::string_view label) {
    if (label == "negative") return 0;
    if (label == "neutral") return 1;
    if (label == "positive") return 2;
    throw InputError("unknown polarity label '" + std::string(label) + "'");
}

std::string_view polarity_name(int id) {
    switch (id) {
        case 0: return "negative";
        case 1: return "neutral";
        case 2: return "positive";
    }
    throw InputError("polarity class id " + std::to_string(id) + " out of range");
}

namespace {

DepTree tree_from_row(const json& row, int line_no) {
    const auto& tokens = row.at("tokens");
    const auto& heads = row.at("heads");
    const auto& deprels = row.at("deprels");
    if (heads.size() != tokens.size() || deprels.size() != tokens.size()) {
        throw InputError("dataset line " + std::to_string(line_no) +
                         ": tokens, heads and deprels lengths differ");
    }
    DepTree tree;
    for (size_t i = 0; i < tokens.size(); ++i) {
        Token tok;
        tok.index = static_cast<int>(i) + 1;
        tok.form = tokens[i].get<std::string>();
        tok.head = heads[i].get<int>();
        tok.deprel = deprels[i].get<std::string>();
        tree.tokens.push_back(std::move(tok));
    }
    if (auto violation = validate_tree(tree)) {
        throw InputError("dataset line " + std::to_string(line_no) + ": invalid tree: " +
                         to_string(violation->kind) +
                         (violation->detail.empty() ? "" : " (" + violation->detail + ")"));
    }
    return tree;
}

}  // namespace

std::vector<Example> parse_dataset(std::string_view jsonl, const std::vector<DepTree>* trees) {
    std::vector<Example> out;
    int line_no = 0;
    size_t row_idx = 0;
    size_t pos = 0;
    while (pos < jsonl.size()) {
        size_t eol = jsonl.find('\n', pos);
        std::string_view line =
            jsonl.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? jsonl.size() : eol + 1;
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }

        Example ex;
        try {
            if (row.contains("heads") != row.contains("deprels")) {
                throw InputError("dataset line " + std::to_string(line_no) +
                                 ": heads and deprels must be given together");
            }
            const bool has_inline = row.contains("heads");
            if (trees) {
                if (row_idx >= trees->size()) {
                    throw InputError("dataset line " + std::to_string(line_no) +
                                     ": no matching sentence " + std::to_string(row_idx + 1) +
                                     " in the CoNLL-U file");
                }
                const DepTree& parsed = (*trees)[row_idx];
                const auto& tokens = row.at("tokens");
                if (static_cast<int>(tokens.size()) != parsed.size()) {
                    throw InputError("dataset line " + std::to_string(line_no) + ": row has " +
                                     std::to_string(tokens.size()) + " tokens but sentence " +
                                     std::to_string(row_idx + 1) + " has " +
                                     std::to_string(parsed.size()));
                }
                // CoNLL-U tokens are canonical: rows must match them exactly.
                for (int i = 0; i < parsed.size(); ++i) {
                    if (tokens[i].get<std::string>() != parsed.tokens[i].form) {
                        throw InputError("dataset line " + std::to_string(line_no) + ": token " +
                                         std::to_string(i + 1) + " '" +
                                         tokens[i].get<std::string>() +
                                         "' does not match the parse ('" + parsed.tokens[i].form +
                                         "')");
                    }
                }
                if (has_inline && tree_from_row(row, line_no) != parsed) {
                    throw InputError("dataset line " + std::to_string(line_no) +
                                     ": inline heads/deprels disagree with the CoNLL-U parse");
                }
                ex.tree = parsed;
            } else {
                if (!has_inline) {
                    throw InputError("dataset line " + std::to_string(line_no) +
                                     ": no inline heads/deprels and no CoNLL-U file given");
                }
                ex.tree = tree_from_row(row, line_no);
            }

            const auto& span = row.at("aspect_span");
            if (!span.is_array() || span.size() != 2) {
                throw InputError("dataset line " + std::to_string(line_no) +
                                 ": aspect_span must be [start, end]");
            }
            ex.aspect_begin = span[0].get<int>();
            ex.aspect_end = span[1].get<int>();
            if (ex.aspect_begin < 0 || ex.aspect_begin >= ex.aspect_end ||
                ex.aspect_end > ex.tree.size()) {
                throw InputError("dataset line " + std::to_string(line_no) + ": aspect_span [" +
                                 std::to_string(ex.aspect_begin) + ", " +
                                 std::to_string(ex.aspect_end) + ") out of bounds for " +
                                 std::to_string(ex.tree.size()) + " tokens");
            }
            ex.label = polarity_id(row.at("label").get<std::string>());
        } catch (const json::exception& e) {
            throw InputError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(ex));
        ++row_idx;
    }
    if (trees && row_idx != trees->size()) {
        throw InputError("dataset has " + std::to_string(row_idx) + " rows but the CoNLL-U file has " +
                         std::to_string(trees->size()) + " sentences");
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Example> load_dataset(const std::string& path, const std::vector<DepTree>* trees) {
    return parse_dataset(read_file(path), trees);
}

}  // namespace rdgcn
