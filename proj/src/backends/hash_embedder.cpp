#include "motionagent/backends/hash_embedder.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"
#include "motionagent/common/text.hpp"

#include <cmath>

namespace motionagent::backends {

HashProjectionEmbedder::HashProjectionEmbedder(std::string model_id, size_t dimension, std::uint64_t seed)
    : Backend({std::move(model_id), BackendKind::Embedder, TransportKind::Template}),
      dimension_(dimension),
      seed_(seed) {
    if (dimension_ == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
}

std::vector<double> HashProjectionEmbedder::embed(std::string_view input) const {
    std::vector<double> v(dimension_, 0.0);
    auto tokens = text::tokenize(input);
    if (tokens.empty()) tokens.push_back("<empty>");
    for (const auto& tok : tokens) {
        std::uint64_t state = fnv1a64(tok, 0xcbf29ce484222325ULL ^ seed_);
        for (auto& x : v) {
            // Uniform in [-1, 1) from the top 53 bits.
            x += static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0;
        return v;
    }
    for (auto& x : v) x /= norm;
    return v;
}

ModelResponse HashProjectionEmbedder::invoke(const ModelRequest& request) {
    if (request.schema_tag != "embed") {
        throw Error(ErrorCode::ScriptExhausted, model_id() + " only serves 'embed' requests");
    }
    ModelResponse r;
    r.fields = {{"embedding", embed(value_or(request.payload, "text", std::string{}))}};
    return r;
}

std::vector<double> embed_text(Backend& embedder, const std::string& input) {
    ModelRequest req{"Embed the text.", {{"text", input}}, "embed"};
    auto response = embedder.invoke(req);
    auto it = response.fields.find("embedding");
    if (it == response.fields.end() || !it->is_array()) {
        throw Error(ErrorCode::MalformedResponse, embedder.model_id() + ": response lacks an embedding");
    }
    std::vector<double> out;
    for (const auto& x : *it) {
        if (!x.is_number()) throw Error(ErrorCode::MalformedResponse, embedder.model_id() + ": non-numeric embedding");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace motionagent::backends
