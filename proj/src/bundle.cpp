#include "stacksent/bundle.hpp"

#include "stacksent/binary_io.hpp"
#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace stacksent {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'M', 'B'};

[[noreturn]] void bad(const std::string& message)
{
    fail(ErrorCode::BadBundle, message);
}

std::string hex64(std::uint64_t value)
{
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

template <typename Derived>
void put_matrix(ByteWriter& w, const Eigen::MatrixBase<Derived>& m)
{
    w.put(static_cast<std::uint32_t>(m.rows()));
    w.put(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) w.put(static_cast<double>(m(i, j)));
}

Eigen::MatrixXd get_matrix(ByteReader& r)
{
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    if (static_cast<std::uint64_t>(rows) * cols * sizeof(double) > r.remaining())
        fail(ErrorCode::Truncated, "matrix payload shorter than its declared shape");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.get<double>();
    return m;
}

template <int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> get_fixed(ByteReader& r)
{
    const Eigen::MatrixXd m = get_matrix(r);
    if (m.rows() != Rows || m.cols() != Cols)
        bad("expected a " + std::to_string(Rows) + "x" + std::to_string(Cols) + " block");
    return m;
}

void put_labels(ByteWriter& w, std::span<const Label> labels)
{
    w.put(static_cast<std::uint32_t>(labels.size()));
    for (Label l : labels) w.put(static_cast<std::uint8_t>(index_of(l)));
}

std::vector<Label> get_labels(ByteReader& r)
{
    const auto n = r.get<std::uint32_t>();
    if (n > r.remaining()) fail(ErrorCode::Truncated, "label list shorter than declared");
    std::vector<Label> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto v = r.get<std::uint8_t>();
        if (v >= kNumClasses) bad("label index " + std::to_string(v) + " out of range");
        out.push_back(label_from_index(v));
    }
    return out;
}

std::uint32_t get_count(ByteReader& r, std::size_t min_bytes_each)
{
    const auto n = r.get<std::uint32_t>();
    if (static_cast<std::uint64_t>(n) * min_bytes_each > r.remaining())
        fail(ErrorCode::Truncated, "list shorter than its declared length");
    return n;
}

void put_logreg_config(ByteWriter& w, const LogRegConfig& c)
{
    w.put(c.c);
    w.put(c.tolerance);
    w.put(static_cast<std::int32_t>(c.max_iterations));
}

LogRegConfig get_logreg_config(ByteReader& r)
{
    LogRegConfig c;
    c.c = r.get<double>();
    c.tolerance = r.get<double>();
    c.max_iterations = r.get<std::int32_t>();
    return c;
}

void put_tree(ByteWriter& w, const DecisionTree& t)
{
    w.put(static_cast<std::uint8_t>(t.mode));
    w.put(static_cast<std::int32_t>(t.max_depth));
    w.put(static_cast<std::uint32_t>(t.nodes.size()));
    for (const auto& n : t.nodes) {
        w.put(static_cast<std::int32_t>(n.feature));
        w.put(n.threshold);
        w.put(static_cast<std::int32_t>(n.left));
        w.put(static_cast<std::int32_t>(n.right));
        for (int k = 0; k < kNumClasses; ++k) w.put(n.distribution(k));
        w.put(n.value);
    }
}

DecisionTree get_tree(ByteReader& r, Eigen::Index dim)
{
    DecisionTree t;
    const auto mode = r.get<std::uint8_t>();
    if (mode > 1) bad("unknown tree mode");
    t.mode = static_cast<TreeMode>(mode);
    t.max_depth = r.get<std::int32_t>();
    const auto n = get_count(r, 4 + 8 + 4 + 4 + 8 * kNumClasses + 8);
    if (n == 0) bad("tree without nodes");
    t.nodes.resize(n);
    for (auto& node : t.nodes) {
        node.feature = r.get<std::int32_t>();
        node.threshold = r.get<double>();
        node.left = r.get<std::int32_t>();
        node.right = r.get<std::int32_t>();
        for (int k = 0; k < kNumClasses; ++k) node.distribution(k) = r.get<double>();
        node.value = r.get<double>();
    }
    // Children must point forward so traversal terminates.
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& node = t.nodes[i];
        if (node.is_leaf()) continue;
        if (node.feature >= dim) bad("tree split on feature " + std::to_string(node.feature) +
                                     " beyond dimension " + std::to_string(dim));
        for (int child : {node.left, node.right})
            if (child <= static_cast<int>(i) || child >= static_cast<int>(n)) bad("tree child index out of range");
    }
    return t;
}

void put_logreg(ByteWriter& w, const LogRegModel& m)
{
    put_logreg_config(w, m.config);
    put_matrix(w, m.weights);
    put_matrix(w, m.bias);
    w.put(static_cast<std::int32_t>(m.iterations));
    w.put(static_cast<std::uint8_t>(m.converged));
}

LogRegModel get_logreg(ByteReader& r)
{
    LogRegModel m;
    m.config = get_logreg_config(r);
    m.weights = get_matrix(r);
    if (m.weights.rows() != kNumClasses) bad("logistic weights need 3 rows");
    m.bias = get_fixed<kNumClasses, 1>(r);
    m.iterations = r.get<std::int32_t>();
    m.converged = r.get<std::uint8_t>() != 0;
    return m;
}

void put_knn(ByteWriter& w, const KnnModel& m)
{
    w.put(static_cast<std::int32_t>(m.k));
    put_matrix(w, m.points);
    put_labels(w, m.labels);
}

KnnModel get_knn(ByteReader& r)
{
    KnnModel m;
    m.k = r.get<std::int32_t>();
    m.points = get_matrix(r);
    m.labels = get_labels(r);
    if (static_cast<Eigen::Index>(m.labels.size()) != m.points.rows()) bad("knn labels and points differ");
    if (m.k < 1 || m.k > m.points.rows()) bad("knn k out of range");
    return m;
}

void put_adaboost(ByteWriter& w, const AdaBoostModel& m)
{
    w.put(static_cast<std::int32_t>(m.config.n_estimators));
    w.put(static_cast<std::int32_t>(m.config.max_depth));
    w.put(static_cast<std::int32_t>(m.config.min_leaf));
    w.put(static_cast<std::uint32_t>(m.stages.size()));
    for (const auto& s : m.stages) {
        w.put(s.alpha);
        w.put(s.error);
        put_tree(w, s.tree);
    }
}

AdaBoostModel get_adaboost(ByteReader& r, Eigen::Index dim)
{
    AdaBoostModel m;
    m.config.n_estimators = r.get<std::int32_t>();
    m.config.max_depth = r.get<std::int32_t>();
    m.config.min_leaf = r.get<std::int32_t>();
    const auto n = get_count(r, 16);
    for (std::uint32_t i = 0; i < n; ++i) {
        AdaBoostStage s;
        s.alpha = r.get<double>();
        s.error = r.get<double>();
        s.tree = get_tree(r, dim);
        m.stages.push_back(std::move(s));
    }
    return m;
}

void put_gbdt(ByteWriter& w, const GbdtModel& m)
{
    w.put(static_cast<std::int32_t>(m.config.n_estimators));
    w.put(m.config.learning_rate);
    w.put(static_cast<std::int32_t>(m.config.max_depth));
    w.put(static_cast<std::int32_t>(m.config.min_leaf));
    put_matrix(w, m.initial_scores);
    w.put(static_cast<std::uint32_t>(m.rounds.size()));
    for (const auto& round : m.rounds)
        for (const auto& tree : round) put_tree(w, tree);
    w.put(static_cast<std::uint32_t>(m.train_loss.size()));
    for (double l : m.train_loss) w.put(l);
}

GbdtModel get_gbdt(ByteReader& r, Eigen::Index dim)
{
    GbdtModel m;
    m.config.n_estimators = r.get<std::int32_t>();
    m.config.learning_rate = r.get<double>();
    m.config.max_depth = r.get<std::int32_t>();
    m.config.min_leaf = r.get<std::int32_t>();
    m.initial_scores = get_fixed<kNumClasses, 1>(r);
    const auto rounds = get_count(r, 3 * 9);
    m.rounds.resize(rounds);
    for (auto& round : m.rounds)
        for (auto& tree : round) tree = get_tree(r, dim);
    const auto losses = get_count(r, 8);
    for (std::uint32_t i = 0; i < losses; ++i) m.train_loss.push_back(r.get<double>());
    return m;
}

void put_bagged(ByteWriter& w, const BaggedModel& m)
{
    w.put(static_cast<std::int32_t>(m.config.members));
    w.put(static_cast<std::uint8_t>(m.config.bootstrap));
    w.put(static_cast<std::uint32_t>(m.members.size()));
    for (std::size_t i = 0; i < m.members.size(); ++i) {
        w.put(m.seeds.at(i));
        put_gbdt(w, m.members[i]);
    }
    // member configs carry the GBDT settings; keep the template too
    w.put(static_cast<std::int32_t>(m.config.gbdt.n_estimators));
    w.put(m.config.gbdt.learning_rate);
    w.put(static_cast<std::int32_t>(m.config.gbdt.max_depth));
    w.put(static_cast<std::int32_t>(m.config.gbdt.min_leaf));
}

BaggedModel get_bagged(ByteReader& r, Eigen::Index dim)
{
    BaggedModel m;
    m.config.members = r.get<std::int32_t>();
    m.config.bootstrap = r.get<std::uint8_t>() != 0;
    const auto n = get_count(r, 8);
    if (n == 0) bad("bagged model without members");
    for (std::uint32_t i = 0; i < n; ++i) {
        m.seeds.push_back(r.get<std::uint64_t>());
        m.members.push_back(get_gbdt(r, dim));
    }
    m.config.gbdt.n_estimators = r.get<std::int32_t>();
    m.config.gbdt.learning_rate = r.get<double>();
    m.config.gbdt.max_depth = r.get<std::int32_t>();
    m.config.gbdt.min_leaf = r.get<std::int32_t>();
    return m;
}

void put_hyperparams(ByteWriter& w, const Hyperparams& hp)
{
    const auto items = hp.items();
    w.put(static_cast<std::uint32_t>(items.size()));
    for (const auto& [key, value] : items) {
        w.put_string(key);
        w.put(value);
    }
}

Hyperparams get_hyperparams(ByteReader& r)
{
    Hyperparams hp;
    const auto n = get_count(r, 12);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::string key = r.get_string();
        hp.set(key, r.get<double>());
    }
    return hp;
}

void put_fold_plan(ByteWriter& w, const FoldPlan& p)
{
    w.put(static_cast<std::int32_t>(p.k));
    w.put(static_cast<std::uint8_t>(p.stratified));
    w.put(p.seed);
    w.put(static_cast<std::uint32_t>(p.indices.size()));
    for (std::size_t i = 0; i < p.indices.size(); ++i) {
        w.put(static_cast<std::uint64_t>(p.indices[i]));
        w.put(static_cast<std::int32_t>(p.assignments.at(i)));
    }
}

FoldPlan get_fold_plan(ByteReader& r)
{
    FoldPlan p;
    p.k = r.get<std::int32_t>();
    p.stratified = r.get<std::uint8_t>() != 0;
    p.seed = r.get<std::uint64_t>();
    const auto n = get_count(r, 12);
    for (std::uint32_t i = 0; i < n; ++i) {
        p.indices.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
        const int fold = r.get<std::int32_t>();
        if (fold < 0 || fold >= p.k) bad("fold assignment out of range");
        p.assignments.push_back(fold);
    }
    return p;
}

void put_stacked(ByteWriter& w, const StackedEnsemble& m)
{
    w.put(m.seed);
    put_hyperparams(w, m.hyperparams);
    put_fold_plan(w, m.fold_plan);
    put_logreg(w, m.base.logreg);
    put_bagged(w, m.base.bagged);
    put_knn(w, m.base.knn);
    put_adaboost(w, m.base.adaboost);
    put_logreg_config(w, m.meta.config);
    put_matrix(w, m.meta.weights);
    put_matrix(w, m.meta.bias);
}

StackedEnsemble get_stacked(ByteReader& r, Eigen::Index dim)
{
    StackedEnsemble m;
    m.seed = r.get<std::uint64_t>();
    m.hyperparams = get_hyperparams(r);
    m.fold_plan = get_fold_plan(r);
    m.base.logreg = get_logreg(r);
    m.base.bagged = get_bagged(r, dim);
    m.base.knn = get_knn(r);
    m.base.adaboost = get_adaboost(r, dim);
    m.meta.config = get_logreg_config(r);
    m.meta.weights = get_fixed<kNumClasses, kMetaWidth>(r);
    m.meta.bias = get_fixed<kNumClasses, 1>(r);
    if (m.base.logreg.dim() != dim || m.base.knn.points.cols() != dim)
        bad("stacked base models disagree with the pipeline dimension");
    return m;
}

std::string model_section(const Classifier& model)
{
    ByteWriter w;
    w.put(static_cast<std::uint8_t>(kind_of(model)));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogRegModel>) put_logreg(w, m);
            else if constexpr (std::is_same_v<T, KnnModel>) put_knn(w, m);
            else if constexpr (std::is_same_v<T, BaggedModel>) put_bagged(w, m);
            else if constexpr (std::is_same_v<T, AdaBoostModel>) put_adaboost(w, m);
            else put_stacked(w, m);
        },
        model);
    return w.take();
}

Classifier parse_model_section(std::string_view bytes, Eigen::Index dim)
{
    ByteReader r(bytes);
    const auto tag = r.get<std::uint8_t>();
    Classifier model;
    switch (static_cast<ModelKind>(tag)) {
    case ModelKind::LogReg: {
        auto m = get_logreg(r);
        if (m.dim() != dim) bad("logistic model dimension disagrees with the pipeline");
        model = std::move(m);
        break;
    }
    case ModelKind::Knn: {
        auto m = get_knn(r);
        if (m.points.cols() != dim) bad("knn dimension disagrees with the pipeline");
        model = std::move(m);
        break;
    }
    case ModelKind::BaggedGbdt: model = get_bagged(r, dim); break;
    case ModelKind::AdaBoost: model = get_adaboost(r, dim); break;
    case ModelKind::Cse: model = get_stacked(r, dim); break;
    default: bad("unknown model kind tag " + std::to_string(tag));
    }
    if (r.remaining() != 0) bad("trailing bytes after the model payload");
    return model;
}

std::string pipeline_section(const FeaturePipeline& p)
{
    ByteWriter w;
    w.put(static_cast<std::uint8_t>(p.feature_set));
    w.put(static_cast<std::uint8_t>(p.standardize));
    w.put_string(p.embedding_model_id);
    const auto& t = p.tfidf;
    w.put(static_cast<std::int32_t>(t.config().min_df));
    w.put(static_cast<std::int32_t>(t.config().ngram_max));
    w.put(static_cast<std::int64_t>(t.n_docs()));
    w.put(static_cast<std::uint32_t>(t.tokens().size()));
    for (std::size_t i = 0; i < t.tokens().size(); ++i) {
        w.put_string(t.tokens()[i]);
        w.put(static_cast<std::int64_t>(t.doc_freq()[i]));
    }
    w.put(static_cast<std::uint8_t>(p.scaler.has_value()));
    if (p.scaler) {
        put_matrix(w, p.scaler->mean);
        put_matrix(w, p.scaler->stdev);
    }
    return w.take();
}

FeaturePipeline parse_pipeline_section(std::string_view bytes)
{
    ByteReader r(bytes);
    FeaturePipeline p;
    const auto set = r.get<std::uint8_t>();
    if (set > 1) bad("unknown feature set tag");
    p.feature_set = static_cast<FeatureSet>(set);
    p.standardize = r.get<std::uint8_t>() != 0;
    p.embedding_model_id = r.get_string();
    TfidfConfig config;
    config.min_df = r.get<std::int32_t>();
    config.ngram_max = r.get<std::int32_t>();
    const auto n_docs = r.get<std::int64_t>();
    const auto n = get_count(r, 12);
    std::vector<std::string> tokens;
    std::vector<std::int64_t> df;
    for (std::uint32_t i = 0; i < n; ++i) {
        tokens.push_back(r.get_string());
        df.push_back(r.get<std::int64_t>());
    }
    p.tfidf = TfidfModel(std::move(tokens), std::move(df), n_docs, config);
    if (r.get<std::uint8_t>() != 0) {
        DenseScaler s;
        s.mean = get_matrix(r);
        s.stdev = get_matrix(r);
        if (s.mean.cols() != 1 || s.stdev.cols() != 1 || s.mean.size() != s.stdev.size())
            bad("scaler mean and stdev shapes differ");
        p.scaler = std::move(s);
    }
    if (p.needs_embeddings() != p.scaler.has_value()) bad("scaler presence disagrees with the feature set");
    if (r.remaining() != 0) bad("trailing bytes after the pipeline");
    return p;
}

std::string provenance_section(const TrainingProvenance& p)
{
    std::ostringstream out;
    out << "config_hash=" << hex64(p.config_hash) << '\n'
        << "split_seed=" << p.split_seed << '\n'
        << "folds_seed=" << p.folds_seed << '\n'
        << "train_seed=" << p.train_seed << '\n'
        << "corpus_fingerprint=" << hex64(p.corpus_fingerprint) << '\n'
        << "embedding_model_id=" << p.embedding_model_id << '\n'
        << "train_rows=" << p.train_rows << '\n'
        << "test_rows=" << p.test_rows << '\n';
    return out.str();
}

std::map<std::string, std::string> key_values(std::string_view text)
{
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) bad("malformed line '" + std::string(line) + "'");
        out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
        start = end + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& text, int base, const std::string& what)
{
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (ec != std::errc{} || end != text.data() + text.size()) bad("bad " + what + " '" + text + "'");
    return value;
}

TrainingProvenance parse_provenance_section(std::string_view text)
{
    auto kv = key_values(text);
    auto need = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) bad(std::string("provenance lacks ") + key);
        return it->second;
    };
    TrainingProvenance p;
    p.config_hash = parse_u64(need("config_hash"), 16, "config hash");
    p.split_seed = parse_u64(need("split_seed"), 10, "split seed");
    p.folds_seed = parse_u64(need("folds_seed"), 10, "folds seed");
    p.train_seed = parse_u64(need("train_seed"), 10, "train seed");
    p.corpus_fingerprint = parse_u64(need("corpus_fingerprint"), 16, "corpus fingerprint");
    p.embedding_model_id = need("embedding_model_id");
    p.train_rows = parse_u64(need("train_rows"), 10, "train rows");
    p.test_rows = parse_u64(need("test_rows"), 10, "test rows");
    return p;
}

const std::vector<std::string>& section_names()
{
    static const std::vector<std::string> names{"config", "pipeline", "model", "provenance"};
    return names;
}

struct Container {
    std::string manifest;
    std::map<std::string, std::string_view> sections;
};

Container read_container(std::string_view bytes)
{
    if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kMagic, 4))
        fail(ErrorCode::BadMagic, "not a model bundle (magic bytes differ)");
    ByteReader r(bytes.substr(4));
    const auto version = r.get<std::uint16_t>();
    if (version != kBundleVersion)
        bad("unsupported bundle version " + std::to_string(version) + " (expected " +
            std::to_string(kBundleVersion) + ")");
    Container c;
    c.manifest = r.get_string();
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = r.get_string();
        const auto size = r.get<std::uint64_t>();
        const auto checksum = r.get<std::uint64_t>();
        if (size > r.remaining()) fail(ErrorCode::Truncated, "section " + name + " is cut short");
        const auto payload = r.get_bytes(static_cast<std::size_t>(size));
        if (fnv1a64(payload) != checksum) bad("checksum mismatch in section " + name);
        if (!c.sections.emplace(name, payload).second) bad("duplicate section " + name);
    }
    if (r.remaining() != 0) bad("trailing bytes after the last section");
    for (const auto& name : section_names())
        if (!c.sections.contains(name)) bad("missing section " + name);
    return c;
}

} // namespace

std::string serialize_bundle(const ModelBundle& bundle)
{
    const std::uint64_t hash = fnv1a64(bundle.config_ini);
    if (bundle.provenance.config_hash != hash) bad("provenance config hash does not match the config");

    std::map<std::string, std::string> sections{
        {"config", bundle.config_ini},
        {"pipeline", pipeline_section(bundle.pipeline)},
        {"model", model_section(bundle.model)},
        {"provenance", provenance_section(bundle.provenance)},
    };

    std::ostringstream manifest;
    manifest << "format=stacksent-model-bundle\n"
             << "version=" << kBundleVersion << '\n'
             << "byte_order=little-endian\n"
             << "real=f64\n"
             << "model=" << model_kind_name(bundle.kind()) << '\n'
             << "feature_set=" << feature_set_name(bundle.pipeline.feature_set) << '\n'
             << "config_hash=" << hex64(hash) << '\n'
             << "sections=config,pipeline,model,provenance\n";

    ByteWriter w;
    w.put_bytes(std::string_view(kMagic, 4));
    w.put(kBundleVersion);
    w.put_string(manifest.str());
    w.put(static_cast<std::uint32_t>(section_names().size()));
    for (const auto& name : section_names()) {
        const auto& payload = sections.at(name);
        w.put_string(name);
        w.put(static_cast<std::uint64_t>(payload.size()));
        w.put(fnv1a64(payload));
        w.put_bytes(payload);
    }
    return w.take();
}

ModelBundle parse_bundle(std::string_view bytes)
{
    const Container c = read_container(bytes);
    const auto manifest = key_values(c.manifest);
    const auto hash_it = manifest.find("config_hash");
    if (hash_it == manifest.end()) bad("manifest lacks config_hash");
    const std::uint64_t hash = parse_u64(hash_it->second, 16, "config hash");

    ModelBundle bundle;
    try {
        bundle.config_ini = std::string(c.sections.at("config"));
        if (fnv1a64(bundle.config_ini) != hash) bad("config hash mismatch: the config section was altered");
        bundle.provenance = parse_provenance_section(c.sections.at("provenance"));
        if (bundle.provenance.config_hash != hash) bad("provenance config hash disagrees with the manifest");
        bundle.pipeline = parse_pipeline_section(c.sections.at("pipeline"));
        bundle.model = parse_model_section(c.sections.at("model"), bundle.pipeline.dim());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadBundle || e.code() == ErrorCode::Truncated) throw;
        bad(e.what());
    }
    const auto model_it = manifest.find("model");
    if (model_it == manifest.end() || model_it->second != model_kind_name(bundle.kind()))
        bad("manifest model kind disagrees with the payload");
    const auto set_it = manifest.find("feature_set");
    if (set_it == manifest.end() || set_it->second != feature_set_name(bundle.pipeline.feature_set))
        bad("manifest feature set disagrees with the pipeline");
    return bundle;
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle)
{
    write_file_atomic(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path)
{
    return parse_bundle(read_file(path));
}

std::string bundle_manifest(std::string_view bytes)
{
    return read_container(bytes).manifest;
}

std::uint64_t corpus_fingerprint(const std::vector<Document>& docs)
{
    ByteWriter w;
    for (const auto& d : docs) {
        w.put(d.id);
        w.put(static_cast<std::int8_t>(d.label ? index_of(*d.label) : -1));
    }
    return fnv1a64(w.bytes());
}

BundlePredictions predict_bundle(const ModelBundle& bundle, const std::vector<Document>& docs,
                                 const EmbeddingTable* table, std::optional<FeatureSet> requested)
{
    const auto& p = bundle.pipeline;
    if (requested && *requested != p.feature_set)
        fail(ErrorCode::FeatureSetMismatch,
             "bundle was trained on " + std::string(feature_set_name(p.feature_set)) +
                 " features, not " + std::string(feature_set_name(*requested)));
    if (p.needs_embeddings() && table != nullptr && table->model_id() != p.embedding_model_id)
        fail(ErrorCode::FeatureSetMismatch, "embeddings come from encoder '" + table->model_id() +
                                                "', bundle expects '" + p.embedding_model_id + "'");
    BundlePredictions out;
    if (docs.empty()) {
        out.probs.resize(0, kNumClasses);
        return out;
    }
    const Eigen::MatrixXd X = p.transform(docs, p.needs_embeddings() ? table : nullptr);
    out.probs = predict_proba_rows(bundle.model, X);
    out.labels = predict_labels(bundle.model, X);
    return out;
}

} // namespace stacksent
