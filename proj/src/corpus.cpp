#include "stacksent/corpus.hpp"

#include "stacksent/error.hpp"
#include "stacksent/random.hpp"
#include "stacksent/utf8.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace stacksent {

namespace {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and
// line breaks. Accepts LF or CRLF record separators.
std::vector<Row> parse_csv(std::string_view data)
{
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < data.size() && data[i + 1] == '\n') ++i;
            end_row();
            break;
        case '\n':
            end_row();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (field_started || !row.empty()) end_row();
    return rows;
}

std::size_t find_column(const Row& header, const std::string& name)
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string h = header[i];
        if (i == 0 && h.starts_with("\xEF\xBB\xBF")) h.erase(0, 3);
        if (h == name) return i;
    }
    return header.size();
}

} // namespace

std::vector<Label> LabeledCorpus::labels() const
{
    std::vector<Label> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.label.value_or(Label::Neutral));
    return out;
}

std::vector<std::string> LabeledCorpus::texts() const
{
    std::vector<std::string> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.text);
    return out;
}

std::vector<DocId> LabeledCorpus::ids() const
{
    std::vector<DocId> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.id);
    return out;
}

std::string normalize_text(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char32_t cp : utf8::decode(text)) {
        if (utf8::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        utf8::append(out, utf8::to_lower(cp));
    }
    return out;
}

DocId document_id(std::string_view normalized_text) { return fnv1a64(normalized_text); }

LabeledCorpus load_corpus(const std::filesystem::path& path, const CsvSchema& schema,
                          bool require_labels)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) fail(ErrorCode::Io, "read failed for " + path.string());

    const auto rows = parse_csv(data);
    if (rows.empty()) fail(ErrorCode::MissingColumn, "no header row in " + path.string());

    const Row& header = rows.front();
    const std::size_t text_col = find_column(header, schema.text_column);
    if (text_col == header.size())
        fail(ErrorCode::MissingColumn, "column '" + schema.text_column + "' not in header");
    const std::size_t label_col = find_column(header, schema.label_column);
    if (label_col == header.size() && require_labels)
        fail(ErrorCode::MissingColumn, "column '" + schema.label_column + "' not in header");

    LabeledCorpus corpus;
    corpus.provenance.source = path.string();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const Row& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue; // blank line
        Document doc;
        doc.text = text_col < row.size() ? row[text_col] : std::string{};
        if (label_col < header.size()) {
            const std::string raw = label_col < row.size() ? row[label_col] : std::string{};
            if (raw.find_first_not_of(" \t") != std::string::npos) {
                doc.label = parse_label(raw);
                if (!doc.label) {
                    fail(ErrorCode::UnknownLabel,
                         "row " + std::to_string(r + 1) + ": unrecognised label '" + raw + "'");
                }
            } else if (require_labels) {
                doc.label.reset(); // missing value, dropped by preprocess
            }
        }
        doc.id = document_id(doc.text);
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

namespace {

LabeledCorpus preprocess_impl(const LabeledCorpus& corpus, bool keep_unlabeled)
{
    LabeledCorpus out;
    out.provenance = corpus.provenance;
    out.provenance.preprocessed = true;
    std::unordered_set<DocId> seen;
    for (const auto& doc : corpus.documents) {
        std::string text = normalize_text(doc.text);
        if (text.empty()) {
            ++out.provenance.dropped_empty;
            continue;
        }
        if (!doc.label && !keep_unlabeled) {
            ++out.provenance.dropped_unlabeled;
            continue;
        }
        const DocId id = document_id(text);
        if (!seen.insert(id).second) {
            ++out.provenance.dropped_duplicates;
            continue;
        }
        out.documents.push_back(Document{id, std::move(text), doc.label});
    }
    return out;
}

std::array<std::vector<std::size_t>, kNumClasses> group_by_class(
    std::span<const std::size_t> positions, std::span<const Label> labels)
{
    std::array<std::vector<std::size_t>, kNumClasses> groups;
    for (std::size_t p : positions) groups[index_of(labels[p])].push_back(p);
    return groups;
}

} // namespace

LabeledCorpus preprocess(const LabeledCorpus& corpus) { return preprocess_impl(corpus, false); }

LabeledCorpus preprocess_unlabeled(const LabeledCorpus& corpus)
{
    return preprocess_impl(corpus, true);
}

SplitPlan split(std::span<const Label> labels, double test_fraction, std::uint64_t seed,
                bool stratified)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
    const std::size_t n = labels.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "split needs at least 2 documents");

    SplitPlan plan;
    plan.test_fraction = test_fraction;
    plan.seed = seed;
    plan.stratified = stratified;

    const auto total_test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))), 1, n - 1);

    SplitMix64 rng(seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    if (!stratified) {
        shuffle(std::span(all), rng);
        plan.test_indices.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(total_test));
        plan.train_indices.assign(all.begin() + static_cast<std::ptrdiff_t>(total_test), all.end());
    } else {
        auto groups = group_by_class(all, labels);
        for (int c = 0; c < kNumClasses; ++c) {
            if (!groups[c].empty() && groups[c].size() < 2) {
                fail(ErrorCode::TooFewPerClass,
                     "class " + std::string(label_name(label_from_index(c))) +
                         " has fewer than 2 documents");
            }
        }
        // Largest-remainder apportionment of the test total across classes;
        // remainder ties go to the lower class index.
        std::array<std::size_t, kNumClasses> quota{};
        std::array<double, kNumClasses> remainder{};
        std::size_t assigned = 0;
        for (int c = 0; c < kNumClasses; ++c) {
            const double exact = test_fraction * static_cast<double>(groups[c].size());
            quota[c] = static_cast<std::size_t>(std::floor(exact));
            remainder[c] = exact - std::floor(exact);
            assigned += quota[c];
        }
        while (assigned < total_test) {
            int best = -1;
            for (int c = 0; c < kNumClasses; ++c) {
                if (groups[c].empty() || quota[c] + 1 >= groups[c].size()) continue;
                if (best < 0 || remainder[c] > remainder[best]) best = c;
            }
            if (best < 0) break;
            ++quota[best];
            remainder[best] = -1.0;
            ++assigned;
        }
        for (int c = 0; c < kNumClasses; ++c) {
            auto& g = groups[c];
            shuffle(std::span(g), rng);
            plan.test_indices.insert(plan.test_indices.end(), g.begin(),
                                     g.begin() + static_cast<std::ptrdiff_t>(quota[c]));
            plan.train_indices.insert(plan.train_indices.end(),
                                      g.begin() + static_cast<std::ptrdiff_t>(quota[c]), g.end());
        }
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

SplitPlan split(const LabeledCorpus& corpus, double test_fraction, std::uint64_t seed,
                bool stratified)
{
    if (corpus.empty()) fail(ErrorCode::InvalidArgument, "cannot split an empty corpus");
    const auto labels = corpus.labels();
    return split(labels, test_fraction, seed, stratified);
}

std::vector<std::size_t> FoldPlan::fold_members(int fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (assignments[i] == fold) out.push_back(indices[i]);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::fold_complement(int fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (assignments[i] != fold) out.push_back(indices[i]);
    }
    return out;
}

FoldPlan make_folds(std::span<const std::size_t> indices, std::span<const Label> labels, int k,
                    bool stratified, std::uint64_t seed)
{
    if (labels.size() != indices.size())
        fail(ErrorCode::LengthMismatch, "one label per index is required");
    if (k < 2) fail(ErrorCode::InvalidArgument, "k must be at least 2");
    if (static_cast<std::size_t>(k) > indices.size())
        fail(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                       std::to_string(indices.size()) + " indices");

    FoldPlan plan;
    plan.k = k;
    plan.indices.assign(indices.begin(), indices.end());
    plan.assignments.assign(indices.size(), 0);
    plan.stratified = stratified;
    plan.seed = seed;

    SplitMix64 rng(seed);
    std::vector<std::size_t> positions(indices.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});

    // Round-robin over the (per-class) shuffled order; the counter runs on
    // across classes so total fold sizes also differ by at most one.
    std::vector<std::size_t> order;
    if (stratified) {
        auto groups = group_by_class(positions, labels);
        for (auto& g : groups) {
            shuffle(std::span(g), rng);
            order.insert(order.end(), g.begin(), g.end());
        }
    } else {
        shuffle(std::span(positions), rng);
        order = std::move(positions);
    }
    for (std::size_t i = 0; i < order.size(); ++i)
        plan.assignments[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return plan;
}

FoldPlan make_folds(std::span<const Label> labels, int k, bool stratified, std::uint64_t seed)
{
    std::vector<std::size_t> indices(labels.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    return make_folds(indices, labels, k, stratified, seed);
}

} // namespace stacksent
