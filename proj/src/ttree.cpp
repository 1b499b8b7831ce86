#include "ccs/ttree.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace ccs::ttree {

namespace {

// Linear index of block (j, i), 0-based, j <= i: column-major over the upper
// triangle.
std::size_t block_index(unsigned j, unsigned i) {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
}

void check_spec(const TreeCodeSpec& spec) {
    if (spec.bit_allocation.empty()) throw std::invalid_argument("ttree: empty bit allocation");
    if (spec.c < 1 || spec.c > 30) throw std::invalid_argument("ttree: c must be in [1,30]");
}

}  // namespace

Bits bits_from_uint(std::uint64_t value, unsigned width) {
    Bits bits(width);
    for (unsigned i = 0; i < width; ++i) bits[i] = (value >> (width - 1 - i)) & 1;
    return bits;
}

std::uint64_t uint_from_bits(const Bits& bits) {
    std::uint64_t v = 0;
    for (const auto b : bits) v = (v << 1) | (b & 1);
    return v;
}

const std::vector<std::uint32_t>& TreeCodeSpec::block(unsigned j, unsigned i) const {
    return blocks[block_index(j, i)];
}

unsigned TreeCodeSpec::k() const {
    return std::accumulate(bit_allocation.begin(), bit_allocation.end(), 0u);
}

TreeCodeSpec build_generator(const std::vector<unsigned>& bit_allocation, unsigned c,
                             std::uint64_t seed) {
    TreeCodeSpec spec;
    spec.bit_allocation = bit_allocation;
    spec.c = c;
    spec.seed = seed;
    check_spec(spec);

    auto eng = rng::make_engine(seed);
    std::uint64_t pool = 0;
    unsigned avail = 0;
    auto draw_bit = [&]() -> std::uint32_t {
        if (avail == 0) {
            pool = eng();
            avail = 64;
        }
        const auto bit = static_cast<std::uint32_t>(pool & 1);
        pool >>= 1;
        --avail;
        return bit;
    };

    const unsigned L = spec.L();
    spec.blocks.resize(block_index(L - 1, L - 1) + 1);
    for (unsigned i = 0; i < L; ++i) {
        for (unsigned j = 0; j <= i; ++j) {
            auto& rows = spec.blocks[block_index(j, i)];
            rows.assign(bit_allocation[j], 0);
            for (auto& row : rows)
                for (unsigned col = 0; col < c; ++col)
                    row |= draw_bit() << (c - 1 - col);
        }
    }
    return spec;
}

namespace {

// Symbol contribution of chunk value `v` (MSB-first bits) against one block.
std::uint32_t chunk_contribution(const std::vector<std::uint32_t>& rows, std::uint32_t v) {
    std::uint32_t acc = 0;
    const auto b = static_cast<unsigned>(rows.size());
    for (unsigned r = 0; r < b; ++r)
        if ((v >> (b - 1 - r)) & 1) acc ^= rows[r];
    return acc;
}

}  // namespace

std::vector<std::uint32_t> encode(const TreeCodeSpec& spec, const Bits& u) {
    check_spec(spec);
    if (u.size() != spec.k()) throw std::domain_error("ttree::encode: message length != k");
    const unsigned L = spec.L();
    std::vector<std::uint32_t> chunks(L);
    std::size_t pos = 0;
    for (unsigned j = 0; j < L; ++j) {
        std::uint32_t v = 0;
        for (unsigned r = 0; r < spec.bit_allocation[j]; ++r) v = (v << 1) | (u[pos++] & 1);
        chunks[j] = v;
    }
    std::vector<std::uint32_t> x(L, 0);
    for (unsigned i = 0; i < L; ++i)
        for (unsigned j = 0; j <= i; ++j) x[i] ^= chunk_contribution(spec.block(j, i), chunks[j]);
    return x;
}

DecodeResult decode(const TreeCodeSpec& spec, const achannel::ReceivedLists& y, unsigned t,
                    std::optional<std::size_t> path_cap) {
    check_spec(spec);
    const unsigned L = spec.L();
    if (y.L() != L) throw std::domain_error("ttree::decode: slot count mismatch");
    if (path_cap && *path_cap < 1) throw std::invalid_argument("ttree::decode: path_cap must be >= 1");

    struct Survivor {
        std::vector<std::uint32_t> chunks;
        unsigned dist;
    };
    std::vector<Survivor> level{{{}, 0}};
    bool overflow = false;

    std::vector<std::uint32_t> ext;
    for (unsigned l = 0; l < L; ++l) {
        const unsigned b = spec.bit_allocation[l];
        // Extension table: symbol contribution of every value of chunk l+1.
        const auto& diag = spec.block(l, l);
        ext.assign(std::size_t{1} << b, 0);
        for (std::uint32_t v = 1; v < ext.size(); ++v) {
            const auto low = static_cast<unsigned>(std::countr_zero(v));
            ext[v] = ext[v & (v - 1)] ^ diag[b - 1 - low];
        }

        std::vector<Survivor> next;
        for (const auto& s : level) {
            std::uint32_t base = 0;
            for (unsigned j = 0; j < l; ++j)
                base ^= chunk_contribution(spec.block(j, l), s.chunks[j]);
            for (std::uint32_t v = 0; v < ext.size(); ++v) {
                const std::uint32_t symbol = base ^ ext[v];
                const unsigned dist = s.dist + (y.slots[l].contains(symbol) ? 0 : 1);
                if (dist > t) continue;
                Survivor child{s.chunks, dist};
                child.chunks.push_back(v);
                next.push_back(std::move(child));
            }
        }
        if (path_cap && next.size() > *path_cap) {
            // Children are generated in lexicographic order, so a stable sort
            // by distance keeps the required (distance, lex) preference.
            std::stable_sort(next.begin(), next.end(),
                             [](const Survivor& a, const Survivor& b) { return a.dist < b.dist; });
            next.resize(*path_cap);
            std::sort(next.begin(), next.end(), [](const Survivor& a, const Survivor& b) {
                return a.chunks < b.chunks;
            });
            overflow = true;
        }
        level = std::move(next);
    }

    DecodeResult out;
    out.overflow = overflow;
    out.messages.reserve(level.size());
    out.distances.reserve(level.size());
    for (const auto& s : level) {
        Bits u;
        u.reserve(spec.k());
        for (unsigned j = 0; j < L; ++j) {
            const unsigned b = spec.bit_allocation[j];
            for (unsigned r = 0; r < b; ++r) u.push_back((s.chunks[j] >> (b - 1 - r)) & 1);
        }
        out.messages.push_back(std::move(u));
        out.distances.push_back(s.dist);
    }
    return out;
}

std::vector<std::uint8_t> serialize_spec(const TreeCodeSpec& spec) {
    check_spec(spec);
    std::vector<std::uint8_t> out;
    auto put_u32 = [&](std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) out.push_back((v >> s) & 0xff);
    };
    put_u32(spec.L());
    put_u32(spec.c);
    for (const auto b : spec.bit_allocation) put_u32(b);

    std::uint8_t acc = 0;
    unsigned used = 0;
    auto put_bit = [&](std::uint32_t bit) {
        acc = static_cast<std::uint8_t>((acc << 1) | (bit & 1));
        if (++used == 8) {
            out.push_back(acc);
            acc = 0;
            used = 0;
        }
    };
    for (unsigned i = 0; i < spec.L(); ++i)
        for (unsigned j = 0; j <= i; ++j)
            for (const auto row : spec.block(j, i))
                for (unsigned col = 0; col < spec.c; ++col) put_bit(row >> (spec.c - 1 - col));
    if (used > 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - used)));
    return out;
}

TreeCodeSpec deserialize_spec(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto get_u32 = [&]() -> std::uint32_t {
        if (pos + 4 > bytes.size()) throw std::runtime_error("ttree: truncated spec");
        std::uint32_t v = 0;
        for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(bytes[pos++]) << s;
        return v;
    };
    TreeCodeSpec spec;
    const std::uint32_t L = get_u32();
    spec.c = get_u32();
    spec.bit_allocation.resize(L);
    for (auto& b : spec.bit_allocation) b = get_u32();
    check_spec(spec);

    std::size_t bit_pos = 0;
    auto get_bit = [&]() -> std::uint32_t {
        const std::size_t byte = pos + bit_pos / 8;
        if (byte >= bytes.size()) throw std::runtime_error("ttree: truncated spec");
        const auto bit = (bytes[byte] >> (7 - bit_pos % 8)) & 1;
        ++bit_pos;
        return bit;
    };
    spec.blocks.resize(block_index(L - 1, L - 1) + 1);
    for (unsigned i = 0; i < L; ++i)
        for (unsigned j = 0; j <= i; ++j) {
            auto& rows = spec.blocks[block_index(j, i)];
            rows.assign(spec.bit_allocation[j], 0);
            for (auto& row : rows)
                for (unsigned col = 0; col < spec.c; ++col) row |= get_bit() << (spec.c - 1 - col);
        }
    return spec;
}

}  // namespace ccs::ttree
