#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hs2s/completion.hpp"
#include "hs2s/model.hpp"
#include "hs2s/motiondata.hpp"

namespace hs2s::io {

// Binary container: magic "HS2S", u32 version, length-prefixed UTF-8
// key=value header (one pair per line), u32 block count, named blocks
// (u32 name length + bytes, u32 rank, u32 dims..., row-major f32 LE data),
// trailing u64 FNV-1a checksum over all preceding bytes. The header key
// `manifest` lists the block names in order; blocks must match it exactly.
inline constexpr std::uint32_t kContainerVersion = 1;

struct Block {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

struct Container {
    std::map<std::string, std::string> header;
    std::vector<Block> blocks;

    const Block* find(const std::string& name) const;
    void add(const std::string& name, const nd::Matrix& m);
    void add(const std::string& name, const nd::Vec& v);
    nd::Matrix matrix(const std::string& name) const;  // StructureError when absent
    nd::Vec vec(const std::string& name) const;
};

void save_container(const std::filesystem::path& path, const Container& c);
Container load_container(const std::filesystem::path& path);

// A full model checkpoint: architecture + weights + the preprocessing that
// produced its training data, plus any fitted completers.
struct Checkpoint {
    model::ArchConfig cfg;
    model::ModelParams params;
    motion::NormStats stats;
    motion::LabelVocab vocab;
    std::vector<completion::CompletionVector> add_completers;
    std::vector<completion::FnCompleter> fn_completers;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Prepared dataset cache: normalization stats, vocab and the normalized
// sequences under a `dataset.` section of the same container format.
struct DatasetCache {
    motion::NormStats stats;
    motion::LabelVocab vocab;
    std::vector<motion::MotionSequence> train;  // normalized
    std::vector<motion::MotionSequence> test;   // normalized
};

void save_dataset(const std::filesystem::path& path, const DatasetCache& ds);
DatasetCache load_dataset(const std::filesystem::path& path);

// Plain comma-separated frame-per-line motion text (same format as input).
void write_motion_text(const std::filesystem::path& path, const nd::Matrix& frames);

}  // namespace hs2s::io
