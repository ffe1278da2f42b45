#pragma once

#include <filesystem>
#include <vector>

#include "akmin/record.hpp"

namespace akmin {

enum class FileFormat { binary, text };

// Binary dataset layout, little-endian throughout:
//   header (16 bytes): magic "BLDS", version u16, table tag u8
//                      (0=NONE,1=S,2=T), reserved u8, record count u64
//   per record:        key i64, payload length u32, payload bytes
// Text layout is one record per line, "key<TAB>payload-as-hex"; it carries
// no table tag and exists for debugging.

/// Serializes records with the canonical framing; `tag` becomes the header
/// table tag. Used for files and for byte-exact comparisons in memory.
std::string serialize_dataset(const std::vector<Record>& records, TableTag tag);

void write_dataset(const std::vector<Record>& records,
                   const std::filesystem::path& path,
                   FileFormat format = FileFormat::binary,
                   TableTag tag = TableTag::none);

/// Reads a dataset; binary records inherit the header table tag, text
/// records come back untagged. Throws ParseError with the byte offset of
/// the first malformed or truncated field.
std::vector<Record> read_dataset(const std::filesystem::path& path,
                                 FileFormat format = FileFormat::binary);

// Join output framing: magic "BLJT", version u16, reserved u8 u8, tuple
// count u64; per tuple: key i64, S-payload (u32 length + bytes), T-payload
// (u32 length + bytes).
void write_join_output(const std::vector<JoinedTuple>& tuples,
                       const std::filesystem::path& path);
std::vector<JoinedTuple> read_join_output(const std::filesystem::path& path);

}  // namespace akmin
