#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blurbkit/error.hpp"
#include "blurbkit/pretrain.hpp"
#include "blurbkit/rng.hpp"
#include "blurbkit/tokenizer.hpp"
#include "blurbkit/vocab.hpp"

namespace py = pybind11;
using namespace blurbkit;

namespace {

using EncodedTuple = std::tuple<std::vector<std::string>, std::vector<TokenId>, std::vector<int>,
                                std::vector<std::int32_t>>;

EncodedTuple to_tuple(Encoding&& enc) {
  return {std::move(enc.pieces), std::move(enc.ids),
          std::vector<int>(enc.segment_ids.begin(), enc.segment_ids.end()),
          std::move(enc.word_index)};
}

// Immutable handle; safe to share across threads.
class BoundTokenizer {
 public:
  BoundTokenizer(const std::string& vocab_path, const std::string& casing, std::size_t max_seq_len,
                 std::optional<bool> strip_accents, std::vector<std::string> protected_tokens) {
    TokenizerConfig config;
    config.casing = parse_casing(casing);
    config.strip_accents = strip_accents;
    config.max_seq_len = max_seq_len;
    config.protected_tokens = std::move(protected_tokens);
    auto vocab = std::make_shared<const Vocabulary>(load_vocab(vocab_path, config.casing));
    tokenizer_ = std::make_shared<const Tokenizer>(std::move(vocab), config);
  }

  EncodedTuple encode(const std::string& text, std::optional<std::size_t> max_len) const {
    py::gil_scoped_release release;
    return to_tuple(tokenizer_->encode(text, max_len));
  }

  EncodedTuple encode_pair(const std::string& a, const std::string& b,
                           std::optional<std::size_t> max_len) const {
    py::gil_scoped_release release;
    return to_tuple(tokenizer_->encode_pair(a, b, max_len));
  }

  std::pair<std::vector<TokenId>, std::vector<TokenId>> mask(
      const std::vector<TokenId>& ids, const std::vector<std::int32_t>& word_index, double rate,
      bool wwm, std::uint64_t seed) const {
    if (ids.size() != word_index.size()) {
      throw DataError("ids and word_index lengths differ (" + std::to_string(ids.size()) + " vs " +
                      std::to_string(word_index.size()) + ")");
    }
    py::gil_scoped_release release;
    const auto& vocab = tokenizer_->vocab();
    const auto plan = select_targets(ids, word_index, rate, wwm, seed, vocab);
    auto masked = apply_plan(ids, plan, vocab);
    return {std::move(masked.masked_ids), std::move(masked.labels)};
  }

  std::size_t vocab_size() const { return tokenizer_->vocab().size(); }
  std::size_t max_seq_len() const { return tokenizer_->config().max_seq_len; }
  std::string token(TokenId id) const { return tokenizer_->vocab().token(id); }
  std::optional<TokenId> token_id(const std::string& token) const {
    return tokenizer_->vocab().find(token);
  }

 private:
  std::shared_ptr<const Tokenizer> tokenizer_;
};

}  // namespace

PYBIND11_MODULE(_blurbkit, m) {
  m.doc() = "Native tokenizer and masking core";
  m.attr("__version__") = BLURBKIT_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  py::class_<BoundTokenizer, std::shared_ptr<BoundTokenizer>>(m, "Tokenizer")
      .def(py::init<const std::string&, const std::string&, std::size_t, std::optional<bool>,
                    std::vector<std::string>>(),
           py::arg("vocab_path"), py::arg("casing") = "uncased", py::arg("max_seq_len") = 512,
           py::arg("strip_accents") = py::none(),
           py::arg("protected_tokens") = std::vector<std::string>{})
      .def("encode", &BoundTokenizer::encode, py::arg("text"), py::arg("max_len") = py::none(),
           "Returns (pieces, ids, segments, word_index) for [CLS] text [SEP].")
      .def("encode_pair", &BoundTokenizer::encode_pair, py::arg("a"), py::arg("b"),
           py::arg("max_len") = py::none(),
           "Returns (pieces, ids, segments, word_index) for [CLS] a [SEP] b [SEP].")
      .def("mask", &BoundTokenizer::mask, py::arg("ids"), py::arg("word_index"),
           py::arg("rate") = 0.15, py::arg("wwm") = false, py::arg("seed"),
           "Returns (masked_ids, labels); labels are -100 where not selected.")
      .def_property_readonly("vocab_size", &BoundTokenizer::vocab_size)
      .def_property_readonly("max_seq_len", &BoundTokenizer::max_seq_len)
      .def("token", &BoundTokenizer::token, py::arg("id"))
      .def("token_id", &BoundTokenizer::token_id, py::arg("token"));

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("ordinal"),
        "Per-record seed used by the command-line `mask` for record `ordinal`.");
  m.def(
      "masking_rate", [](double progress) { return masking_rate(progress); }, py::arg("progress"));
}
