#include "stacksent/synthetic.hpp"

#include "stacksent/binary_io.hpp"
#include "stacksent/random.hpp"
#include "stacksent/text_features.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace stacksent {

namespace {

const std::vector<std::string> kAspects{
    "la habitación", "el servicio",     "la comida",   "el personal",  "los precios",
    "la ubicación",  "el desayuno",     "la limpieza", "el wifi",      "la atención",
    "la piscina",    "el estacionamiento", "la cama",  "el baño",      "la recepción",
    "el restaurante", "la vista",       "el check in", "la música",    "el aire acondicionado"};

const std::array<std::vector<std::string>, kNumClasses> kCues{{
    {"terrible", "mala", "sucia", "lento", "carísimo", "grosero", "pésima", "decepcionante",
     "horrible", "nunca volvería"},
    {"normal", "regular", "aceptable", "correcta", "estándar", "adecuada", "promedio",
     "razonable", "sin novedad", "cumple"},
    {"excelente", "buena", "increíble", "impecable", "amable", "cómoda", "deliciosa",
     "recomendable", "espectacular", "la comodidad y la buena atención"},
}};

const std::vector<std::string> kFillers{
    "en general",       "la verdad",        "durante la estadía", "el fin de semana",
    "para la familia",  "con mi pareja",    "en la noche",        "al llegar",
    "por la mañana",    "en temporada alta", "para el precio",    "según lo visto",
    "en el segundo piso", "con los niños",  "después del viaje",  "en la última visita"};

const std::vector<std::string> kVerbs{"es", "estuvo", "fue", "me pareció", "resultó", "está"};
const std::vector<std::string> kJoiners{" pero ", " y ", " aunque ", ", además ", ". "};

template <typename T>
const T& pick(const std::vector<T>& items, SplitMix64& rng)
{
    return items[rng.uniform(items.size())];
}

int pick_class(SplitMix64& rng)
{
    const double u = rng.uniform01();
    return u < 1.0 / 3.0 ? 0 : (u < 2.0 / 3.0 ? 1 : 2);
}

// Class of each clause's cue: mostly the document's class, otherwise
// drawn from the other two.
int clause_class(int doc_class, double own_prob, SplitMix64& rng)
{
    if (rng.uniform01() < own_prob) return doc_class;
    return (doc_class + 1 + static_cast<int>(rng.uniform(2))) % kNumClasses;
}

std::string make_text(int doc_class, SplitMix64& rng)
{
    const int clauses = 1 + static_cast<int>(rng.uniform(3));
    std::string text;
    for (int c = 0; c < clauses; ++c) {
        if (c > 0) text += pick(kJoiners, rng);
        const int cls = c == 0 ? doc_class : clause_class(doc_class, 0.55, rng);
        const auto& cue = pick(kCues[static_cast<std::size_t>(cls)], rng);
        if (rng.uniform01() < 0.5) {
            text += pick(kAspects, rng) + " " + pick(kVerbs, rng) + " " + cue;
        } else {
            text += cue + " " + pick(kAspects, rng);
        }
        if (rng.uniform01() < 0.4) text += " " + pick(kFillers, rng);
    }
    if (rng.uniform01() < 0.3) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    if (rng.uniform01() < 0.5) text += rng.uniform01() < 0.5 ? "." : "!";
    return text;
}

// Same normalised text: upper-cased ASCII, padded and with a widened space.
std::string messy_variant(const std::string& text)
{
    std::string out = "  ";
    bool widened = false;
    for (char c : text) {
        if (c == ' ' && !widened) {
            out += "   ";
            widened = true;
            continue;
        }
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out + "\t";
}

} // namespace

SyntheticCorpus generate_synthetic(const SyntheticOptions& options)
{
    SplitMix64 rng(derive_seed(options.seed, "synthetic-text"));
    const Eigen::Index dim = options.embedding_dim;

    // Class directions and a word projection shared by all documents.
    SplitMix64 basis_rng(derive_seed(options.seed, "synthetic-basis"));
    Eigen::MatrixXd class_dirs(kNumClasses, dim);
    for (Eigen::Index k = 0; k < kNumClasses; ++k)
        for (Eigen::Index j = 0; j < dim; ++j) class_dirs(k, j) = basis_rng.normal();
    class_dirs.rowwise().normalize();

    SyntheticCorpus out;
    out.raw.provenance.source = "synthetic";
    out.embeddings = EmbeddingTable(dim, Pooling::MeanPool, "synthetic-pseudo-encoder-v1");

    std::unordered_set<DocId> seen;
    std::vector<std::pair<std::string, Label>> kept;
    while (kept.size() < options.documents) {
        const int latent = pick_class(rng);
        std::string text = make_text(latent, rng);
        const std::string normalized = normalize_text(text);
        const DocId id = document_id(normalized);
        if (!seen.insert(id).second) continue;

        int observed = latent;
        if (rng.uniform01() < options.label_noise)
            observed = (latent + 1 + static_cast<int>(rng.uniform(2))) % kNumClasses;

        // Pseudo-embedding: scaled class direction + word projection + noise.
        SplitMix64 doc_rng(derive_seed(options.seed, "synthetic-embedding", id));
        Eigen::VectorXd e = 4.5 * class_dirs.row(latent).transpose();
        for (const auto& token : tokenize(normalized)) {
            SplitMix64 word_rng(derive_seed(options.seed, "synthetic-word", fnv1a64(token)));
            for (Eigen::Index j = 0; j < dim; ++j) e(j) += 0.35 * word_rng.normal();
        }
        for (Eigen::Index j = 0; j < dim; ++j) e(j) += doc_rng.normal();
        out.embeddings.add(id, (8.0 * e).cast<float>());

        kept.emplace_back(std::move(text), label_from_index(observed));
    }

    for (const auto& [text, label] : kept)
        out.raw.documents.push_back(Document{document_id(text), text, label});

    // Rows the preprocessing step is expected to remove.
    SplitMix64 messy(derive_seed(options.seed, "synthetic-messy"));
    for (std::size_t m = 0; m < options.messy_rows; ++m) {
        if (m % 4 == 3) {
            out.raw.documents.push_back(Document{0, "   ", Label::Neutral});
            continue;
        }
        const auto& source = kept[messy.uniform(kept.size())];
        const std::string variant = messy_variant(source.first);
        out.raw.documents.push_back(Document{document_id(variant), variant, source.second});
    }
    return out;
}

std::string corpus_to_csv(const LabeledCorpus& corpus)
{
    std::string csv = "text,label\n";
    for (const auto& doc : corpus.documents) {
        csv += '"';
        for (char c : doc.text) {
            if (c == '"') csv += '"';
            csv += c;
        }
        csv += "\",";
        csv += doc.label ? std::string(label_name(*doc.label)) : std::string{};
        csv += '\n';
    }
    return csv;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& csv_path,
                     const std::filesystem::path& emb_path)
{
    write_file_atomic(csv_path, corpus_to_csv(corpus.raw));
    write_embeddings(emb_path, corpus.embeddings);
}

} // namespace stacksent
