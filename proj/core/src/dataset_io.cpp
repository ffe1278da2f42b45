#include "akmin/dataset_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "akmin/errors.hpp"

namespace akmin {

namespace {

constexpr char kDatasetMagic[4] = {'B', 'L', 'D', 'S'};
constexpr char kJoinMagic[4] = {'B', 'L', 'J', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint32_t kMaxPayloadLen = 1u << 24;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

/// Cursor over an in-memory file image; every read checks bounds and
/// reports the offset where data ran out.
struct Reader {
  std::string_view data;
  std::uint64_t pos = 0;

  void need(std::uint64_t n, const char* what) {
    if (pos + n > data.size()) {
      throw ParseError(std::string("truncated file while reading ") + what, pos);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
    pos += 2;
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::string bytes(std::uint32_t n, const char* what) {
    need(n, what);
    std::string s(data.substr(pos, n));
    pos += n;
    return s;
  }
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

void spit(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::string to_hex(const std::string& bytes) {
  static const char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string serialize_dataset(const std::vector<Record>& records, TableTag tag) {
  std::string out;
  std::size_t bytes = 16;
  for (const auto& r : records) bytes += 12 + r.payload.size();
  out.reserve(bytes);
  out.append(kDatasetMagic, 4);
  put_u16(out, kVersion);
  out.push_back(static_cast<char>(tag));
  out.push_back(0);  // reserved
  put_u64(out, records.size());
  for (const auto& r : records) {
    if (r.payload.size() > kMaxPayloadLen) {
      throw IoError("payload of " + std::to_string(r.payload.size()) +
                    " bytes exceeds the format limit");
    }
    put_i64(out, r.key);
    put_u32(out, static_cast<std::uint32_t>(r.payload.size()));
    out.append(r.payload);
  }
  return out;
}

void write_dataset(const std::vector<Record>& records,
                   const std::filesystem::path& path, FileFormat format,
                   TableTag tag) {
  if (format == FileFormat::binary) {
    spit(path, serialize_dataset(records, tag));
    return;
  }
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(r.key);
    out.push_back('\t');
    out += to_hex(r.payload);
    out.push_back('\n');
  }
  spit(path, out);
}

namespace {

std::vector<Record> read_binary(const std::string& data) {
  Reader rd{data};
  rd.need(4, "magic");
  if (std::memcmp(data.data(), kDatasetMagic, 4) != 0) {
    throw ParseError("bad magic, expected BLDS", 0);
  }
  rd.pos = 4;
  const std::uint16_t version = rd.u16("version");
  if (version != kVersion) {
    throw ParseError("unsupported version " + std::to_string(version), 4);
  }
  const std::uint64_t tag_off = rd.pos;
  rd.need(2, "table tag");
  const auto tag_byte = static_cast<unsigned char>(data[rd.pos]);
  if (tag_byte > 2) throw ParseError("bad table tag", tag_off);
  rd.pos += 2;  // tag + reserved
  const std::uint64_t count = rd.u64("record count");

  std::vector<Record> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Record rec;
    rec.key = static_cast<std::int64_t>(rd.u64("record key"));
    const std::uint32_t len = rd.u32("payload length");
    if (len > kMaxPayloadLen) throw ParseError("payload length too large", rd.pos - 4);
    rec.payload = rd.bytes(len, "payload bytes");
    rec.table = static_cast<TableTag>(tag_byte);
    out.push_back(std::move(rec));
  }
  if (rd.pos != data.size()) {
    throw ParseError("trailing bytes after last record", rd.pos);
  }
  return out;
}

std::vector<Record> read_text(const std::string& data) {
  std::vector<Record> out;
  std::uint64_t pos = 0;
  while (pos < data.size()) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) eol = data.size();
    const std::string_view line(data.data() + pos, eol - pos);
    if (!line.empty()) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw ParseError("missing tab separator", pos);
      }
      Record rec;
      const auto [ptr, ec] =
          std::from_chars(line.data(), line.data() + tab, rec.key);
      if (ec != std::errc() || ptr != line.data() + tab) {
        throw ParseError("bad key field", pos);
      }
      const std::string_view hex = line.substr(tab + 1);
      if (hex.size() % 2 != 0) {
        throw ParseError("odd-length hex payload", pos + tab + 1);
      }
      rec.payload.reserve(hex.size() / 2);
      for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
          throw ParseError("bad hex digit", pos + tab + 1 + i);
        }
        rec.payload.push_back(static_cast<char>((hi << 4) | lo));
      }
      out.push_back(std::move(rec));
    }
    pos = eol + 1;
  }
  return out;
}

}  // namespace

std::vector<Record> read_dataset(const std::filesystem::path& path,
                                 FileFormat format) {
  const std::string data = slurp(path);
  return format == FileFormat::binary ? read_binary(data) : read_text(data);
}

void write_join_output(const std::vector<JoinedTuple>& tuples,
                       const std::filesystem::path& path) {
  std::string out;
  out.append(kJoinMagic, 4);
  put_u16(out, kVersion);
  out.push_back(0);
  out.push_back(0);
  put_u64(out, tuples.size());
  for (const auto& tup : tuples) {
    if (tup.s_payload.size() > kMaxPayloadLen || tup.t_payload.size() > kMaxPayloadLen) {
      throw IoError("joined-tuple payload exceeds the format limit");
    }
    put_i64(out, tup.key);
    put_u32(out, static_cast<std::uint32_t>(tup.s_payload.size()));
    out.append(tup.s_payload);
    put_u32(out, static_cast<std::uint32_t>(tup.t_payload.size()));
    out.append(tup.t_payload);
  }
  spit(path, out);
}

std::vector<JoinedTuple> read_join_output(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  Reader rd{data};
  rd.need(4, "magic");
  if (std::memcmp(data.data(), kJoinMagic, 4) != 0) {
    throw ParseError("bad magic, expected BLJT", 0);
  }
  rd.pos = 4;
  const std::uint16_t version = rd.u16("version");
  if (version != kVersion) {
    throw ParseError("unsupported version " + std::to_string(version), 4);
  }
  rd.pos += 2;  // reserved
  const std::uint64_t count = rd.u64("tuple count");
  std::vector<JoinedTuple> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    JoinedTuple tup;
    tup.key = static_cast<std::int64_t>(rd.u64("tuple key"));
    const std::uint32_t slen = rd.u32("S payload length");
    if (slen > kMaxPayloadLen) throw ParseError("payload length too large", rd.pos - 4);
    tup.s_payload = rd.bytes(slen, "S payload");
    const std::uint32_t tlen = rd.u32("T payload length");
    if (tlen > kMaxPayloadLen) throw ParseError("payload length too large", rd.pos - 4);
    tup.t_payload = rd.bytes(tlen, "T payload");
    out.push_back(std::move(tup));
  }
  if (rd.pos != data.size()) {
    throw ParseError("trailing bytes after last tuple", rd.pos);
  }
  return out;
}

}  // namespace akmin
