#include "beltrami/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) {
      out = (out << 8) | ((v >> (8 * b)) & 0xFFu);
    }
    return out;
  }
  return v;
}

void put_double(std::string& buf, double d) {
  const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(d));
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  buf.append(bytes, 8);
}

double get_double(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little_endian(bits));
}

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_field(const ComplexField& field, const std::string& path) {
  const GridSpec& g = field.grid();
  std::string buf = "CFLD1\n";
  buf += std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + csv_number(g.x_min) + " " + csv_number(g.y_min) +
         " " + csv_number(g.dx) + " " + csv_number(g.dy) + "\n";
  buf.reserve(buf.size() + 16 * g.size());
  for (const auto& v : field.samples()) {
    put_double(buf, v.real());
    put_double(buf, v.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw IoError("write failed for '" + path + "'");
  }
}

ComplexField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::string magic;
  std::string header;
  if (!std::getline(in, magic) || magic != "CFLD1" || !std::getline(in, header)) {
    throw IoError("'" + path + "' is not a CFLD1 file");
  }
  GridSpec g;
  std::istringstream hs(header);
  hs.imbue(std::locale::classic());
  if (!(hs >> g.nx >> g.ny >> g.x_min >> g.y_min >> g.dx >> g.dy)) {
    throw IoError("malformed CFLD1 header in '" + path + "'");
  }
  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() != 16 * g.nx * g.ny) {
    throw IoError("'" + path + "' payload has " + std::to_string(payload.size()) + " bytes, expected " +
                  std::to_string(16 * g.nx * g.ny));
  }
  std::vector<cplx> samples(g.nx * g.ny);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    samples[k] = cplx(get_double(payload.data() + 16 * k), get_double(payload.data() + 16 * k + 8));
  }
  return ComplexField(g, std::move(samples));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string buf;
  auto line = [&buf](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        buf += ',';
      }
      buf += cells[i];
    }
    buf += '\n';
  };
  line(header);
  for (const auto& r : rows) {
    line(r);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw IoError("write failed for '" + path + "'");
  }
}

}  // namespace beltrami
