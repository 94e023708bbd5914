#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rdgcn {

// One token of a parsed sentence. `head` follows the CoNLL-U convention:
// a 1-based index of the governing token, 0 for the sentence root.
struct Token {
    int index = 0;  // 1-based position within the sentence
    std::string form;
    int head = 0;
    std::string deprel;

    bool operator==(const Token&) const = default;
};

// A parsed sentence. The virtual ROOT node is not stored; the root token is
// the one with head == 0 and keeps no edge to ROOT, so a valid tree has
// exactly N-1 undirected edges over the real tokens.
struct DepTree {
    std::vector<Token> tokens;

    int size() const { return static_cast<int>(tokens.size()); }

    bool operator==(const DepTree&) const = default;
};

enum class TreeViolationKind {
    HeadOutOfRange,
    MultipleRoots,
    Cycle,
};

const char* to_string(TreeViolationKind kind);

struct TreeViolation {
    TreeViolationKind kind;
    std::string detail;
};

// Checks the DepTree invariants (heads in range, single root, acyclic and
// connected once the ROOT edge is dropped). Returns the first violation
// found, or nullopt for a well-formed tree. A head vector with in-range
// entries and no root, or with unreachable tokens, necessarily contains a
// cycle, so those cases report Cycle.
std::optional<TreeViolation> validate_tree(const DepTree& tree);

// Parses a 10-column CoNLL-U document. Sentences are separated by blank
// lines; `#` comment lines, multiword-token range lines ("3-4") and empty
// nodes ("8.1") are skipped. Only ID, FORM, HEAD and DEPREL are retained.
// Throws InputError on malformed rows (with the line number) and on trees
// that fail validation (naming the sentence).
std::vector<DepTree> parse_conllu(std::string_view text);

// Emits one sentence as a CoNLL-U block (dropped columns become "_").
// parse_conllu(serialize_conllu(t)) reproduces t exactly.
std::string serialize_conllu(const DepTree& tree);

inline constexpr int kNumClasses = 3;

// Fixed polarity order: negative=0, neutral=1, positive=2.
int polarity_id(std::string_view label);
std::string_view polarity_name(int id);

// One labeled sentence-aspect pair. The aspect is the half-open token-index
// interval [aspect_begin, aspect_end), 0-based, contiguous by construction.
struct Example {
    DepTree tree;
    int aspect_begin = 0;
    int aspect_end = 0;
    int label = 0;

    int aspect_len() const { return aspect_end - aspect_begin; }
};

// Loads a JSONL dataset: one object per line with fields
//   {"tokens": [string], "heads": [int, 0=ROOT], "deprels": [string],
//    "aspect_span": [start, end], "label": "negative"|"neutral"|"positive"}
// `trees`, when given, supplies the parses from a companion CoNLL-U file,
// matched to rows by position; rows may then omit "heads"/"deprels", and
// inline values must agree with the companion parse exactly.
std::vector<Example> parse_dataset(std::string_view jsonl,
                                   const std::vector<DepTree>* trees = nullptr);

std::vector<Example> load_dataset(const std::string& path,
                                  const std::vector<DepTree>* trees = nullptr);

std::string read_file(const std::string& path);

}  // namespace rdgcn
