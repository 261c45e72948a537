#include "stacksent/config.hpp"

#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace stacksent {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? s.size() : comma;
        const std::string item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string where(const std::string& section, const std::string& key)
{
    return "[" + section + "] " + key;
}

double to_double(const std::string& text, const std::string& context)
{
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        fail(ErrorCode::Config, context + ": '" + text + "' is not a number");
    return value;
}

std::uint64_t to_u64(const std::string& text, const std::string& context)
{
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        fail(ErrorCode::Config, context + ": '" + text + "' is not a non-negative integer");
    return value;
}

int to_int(const std::string& text, const std::string& context)
{
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        fail(ErrorCode::Config, context + ": '" + text + "' is not an integer");
    return value;
}

bool to_bool(const std::string& text, const std::string& context)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorCode::Config, context + ": '" + text + "' is not true/false");
}

std::string number(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

const char* boolean(bool value) { return value ? "true" : "false"; }

SelectionMetric parse_metric(const std::string& text)
{
    if (text == "accuracy") return SelectionMetric::Accuracy;
    if (text == "weighted_f1") return SelectionMetric::WeightedF1;
    fail(ErrorCode::Config, "grid metric must be accuracy or weighted_f1, got '" + text + "'");
}

Averaging parse_averaging(const std::string& text)
{
    if (text == "weighted") return Averaging::Weighted;
    if (text == "macro") return Averaging::Macro;
    fail(ErrorCode::Config, "averaging must be weighted or macro, got '" + text + "'");
}

// Known keys per section; anything else is rejected so typos surface.
const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"data", {"corpus", "embeddings", "text_col", "label_col"}},
        {"features", {"set", "min_df", "ngram_max", "standardize"}},
        {"split", {"test_fraction", "seed", "stratified"}},
        {"folds", {"k", "stratified", "seed"}},
        {"model", {"kind", "seed"}},
        {"hyperparams", {}},
        {"grid", {}},
        {"compare", {"models", "feature_sets"}},
        {"output", {"dir", "averaging"}},
    };
    return keys;
}

} // namespace

void ExperimentConfig::set_seed(std::uint64_t seed)
{
    split_seed = seed;
    folds_seed = seed;
    train_seed = seed;
}

void ExperimentConfig::validate() const
{
    if (corpus.empty()) fail(ErrorCode::Config, "no corpus configured ([data] corpus or --corpus)");
    if (features.feature_set == FeatureSet::TfidfEmbeddings && !embeddings)
        fail(ErrorCode::Config, "feature set tfidf+emb requires an embeddings file (--embeddings)");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorCode::Config, "test fraction must lie strictly between 0 and 1");
    if (folds < 2) fail(ErrorCode::Config, "folds must be at least 2");
    if (features.tfidf.min_df < 1) fail(ErrorCode::Config, "min_df must be at least 1");
    if (features.tfidf.ngram_max < 1) fail(ErrorCode::Config, "ngram_max must be at least 1");
    if (compare_models.empty()) fail(ErrorCode::Config, "[compare] models is empty");
    if (compare_features.empty()) fail(ErrorCode::Config, "[compare] feature_sets is empty");
    for (const auto& [key, values] : grid.axes) {
        require_key(model, key);
        if (values.empty()) fail(ErrorCode::Config, "grid key " + key + " has no values");
    }
}

ExperimentConfig parse_config(std::string_view ini_text)
{
    pt::ptree tree;
    try {
        std::istringstream in{std::string(ini_text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorCode::Config, std::string("config: ") + e.what());
    }

    for (const auto& [section, body] : tree) {
        const auto known = known_keys().find(section);
        if (known == known_keys().end()) {
            if (body.empty())
                fail(ErrorCode::Config, "config: key '" + section + "' outside any section");
            fail(ErrorCode::Config, "config: unknown section [" + section + "]");
        }
        if (section == "hyperparams" || section == "grid") continue;
        for (const auto& [key, value] : body) {
            if (!known->second.contains(key))
                fail(ErrorCode::Config, "config: unknown key " + where(section, key));
        }
    }

    ExperimentConfig c;
    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.')))
            return trim(*v);
        return std::nullopt;
    };

    if (auto v = get("data", "corpus")) c.corpus = *v;
    if (auto v = get("data", "embeddings"); v && !v->empty()) c.embeddings = *v;
    if (auto v = get("data", "text_col")) c.schema.text_column = *v;
    if (auto v = get("data", "label_col")) c.schema.label_column = *v;

    if (auto v = get("features", "set")) c.features.feature_set = parse_feature_set(*v);
    if (auto v = get("features", "min_df")) c.features.tfidf.min_df = to_int(*v, where("features", "min_df"));
    if (auto v = get("features", "ngram_max"))
        c.features.tfidf.ngram_max = to_int(*v, where("features", "ngram_max"));
    if (auto v = get("features", "standardize"))
        c.features.standardize = to_bool(*v, where("features", "standardize"));

    if (auto v = get("split", "test_fraction"))
        c.test_fraction = to_double(*v, where("split", "test_fraction"));
    if (auto v = get("split", "seed")) c.split_seed = to_u64(*v, where("split", "seed"));
    if (auto v = get("split", "stratified")) c.split_stratified = to_bool(*v, where("split", "stratified"));

    if (auto v = get("folds", "k")) c.folds = to_int(*v, where("folds", "k"));
    if (auto v = get("folds", "stratified")) c.folds_stratified = to_bool(*v, where("folds", "stratified"));
    if (auto v = get("folds", "seed")) c.folds_seed = to_u64(*v, where("folds", "seed"));

    if (auto v = get("model", "kind")) {
        try {
            c.model = parse_model_kind(*v);
        } catch (const Error& e) {
            fail(ErrorCode::Config, e.message());
        }
    }
    if (auto v = get("model", "seed")) c.train_seed = to_u64(*v, where("model", "seed"));

    if (auto section = tree.get_child_optional("hyperparams")) {
        for (const auto& [key, value] : *section) {
            require_key(c.model, key);
            c.hyperparams.set(key, trim(value.data()));
        }
    }

    if (auto section = tree.get_child_optional("grid")) {
        for (const auto& [key, value] : *section) {
            if (key == "metric") {
                c.grid_metric = parse_metric(trim(value.data()));
                continue;
            }
            require_key(c.model, key);
            std::vector<double> values;
            for (const auto& item : split_list(value.data())) values.push_back(to_double(item, where("grid", key)));
            c.grid.axes.emplace_back(key, std::move(values));
        }
    }

    if (auto v = get("compare", "models")) {
        c.compare_models.clear();
        for (const auto& item : split_list(*v)) {
            try {
                c.compare_models.push_back(parse_model_kind(item));
            } catch (const Error& e) {
                fail(ErrorCode::Config, e.message());
            }
        }
    }
    if (auto v = get("compare", "feature_sets")) {
        c.compare_features.clear();
        for (const auto& item : split_list(*v)) c.compare_features.push_back(parse_feature_set(item));
    }

    if (auto v = get("output", "dir")) c.out_dir = *v;
    if (auto v = get("output", "averaging")) c.averaging = parse_averaging(*v);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Config, "cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_ini(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << "[data]\n"
        << "corpus = " << c.corpus.generic_string() << '\n'
        << "embeddings = " << (c.embeddings ? c.embeddings->generic_string() : "") << '\n'
        << "text_col = " << c.schema.text_column << '\n'
        << "label_col = " << c.schema.label_column << "\n\n";
    out << "[features]\n"
        << "set = " << feature_set_name(c.features.feature_set) << '\n'
        << "min_df = " << c.features.tfidf.min_df << '\n'
        << "ngram_max = " << c.features.tfidf.ngram_max << '\n'
        << "standardize = " << boolean(c.features.standardize) << "\n\n";
    out << "[split]\n"
        << "test_fraction = " << number(c.test_fraction) << '\n'
        << "seed = " << c.split_seed << '\n'
        << "stratified = " << boolean(c.split_stratified) << "\n\n";
    out << "[folds]\n"
        << "k = " << c.folds << '\n'
        << "stratified = " << boolean(c.folds_stratified) << '\n'
        << "seed = " << c.folds_seed << "\n\n";
    out << "[model]\n"
        << "kind = " << model_kind_name(c.model) << '\n'
        << "seed = " << c.train_seed << "\n\n";
    out << "[hyperparams]\n";
    for (const auto& key : Hyperparams::keys_for(c.model))
        out << key << " = " << number(c.hyperparams.get(key)) << '\n';
    out << '\n';
    if (!c.grid.axes.empty()) {
        out << "[grid]\n";
        for (const auto& [key, values] : c.grid.axes) {
            out << key << " =";
            for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ", " : " ") << number(values[i]);
            out << '\n';
        }
        out << "metric = " << (c.grid_metric == SelectionMetric::Accuracy ? "accuracy" : "weighted_f1")
            << "\n\n";
    }
    out << "[compare]\nmodels =";
    for (std::size_t i = 0; i < c.compare_models.size(); ++i)
        out << (i ? ", " : " ") << model_kind_name(c.compare_models[i]);
    out << "\nfeature_sets =";
    for (std::size_t i = 0; i < c.compare_features.size(); ++i)
        out << (i ? ", " : " ") << feature_set_name(c.compare_features[i]);
    out << "\n\n[output]\n"
        << "dir = " << c.out_dir.generic_string() << '\n'
        << "averaging = " << (c.averaging == Averaging::Weighted ? "weighted" : "macro") << '\n';
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config)
{
    return fnv1a64(to_ini(config));
}

void apply_param_override(ExperimentConfig& config, std::string_view assignment)
{
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos)
        fail(ErrorCode::Config, "--param expects key=value, got '" + std::string(assignment) + "'");
    const std::string key = trim(assignment.substr(0, eq));
    require_key(config.model, key);
    config.hyperparams.set(key, assignment.substr(eq + 1));
}

} // namespace stacksent
