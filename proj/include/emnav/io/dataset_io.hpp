// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "emnav/corpus/benchmark.hpp"

namespace emnav::io {

/// World directory:
///   folds.json           {"train": [ids], "val_seen": [ids], "val_unseen": [ids]}
///   train/house_<id>.txt
///   val_unseen/house_<id>.txt
/// val_seen reuses the training houses.
void save_worlds(const std::filesystem::path& dir, const world::WorldSet& worlds);
world::WorldSet load_worlds(const std::filesystem::path& dir);

/// One JSON record per line. VLN:
///   {"task":"vln","house":h,"tokens":[...],"token_ids":[...],
///    "start":{"node":n,"heading":x,"elevation":y},"path":[...],"goal":{"node":g}}
/// NDH:
///   {"task":"ndh","house":h,"target":t,"turns":[{"question":[...],"answer":[...]}],
///    "tokens":[full-history tokens],"token_ids":[...],"start":{...},
///    "navigator_path":[...],"oracle_path":[...],"goal":{"room":r}}
/// Token ids are informative; loading rebuilds samples from the token strings.
void write_fold(std::ostream& out, const corpus::Fold& fold, const corpus::Vocab& vocab);
corpus::Fold read_fold(std::istream& in);

void save_vocab(const std::filesystem::path& path, const corpus::Vocab& vocab);
corpus::Vocab load_vocab(const std::filesystem::path& path);

/// Corpus directory: train.jsonl, val_seen.jsonl, val_unseen.jsonl, vocab.txt.
void save_corpus(const std::filesystem::path& dir, const corpus::Benchmark& bench, const corpus::Vocab& vocab);

/// Houses from `worlds_dir` and folds from `corpus_dir`. Throws naming the
/// missing file when a fold is absent.
corpus::Benchmark load_benchmark(const std::filesystem::path& worlds_dir, const std::filesystem::path& corpus_dir);

}  // namespace emnav::io
