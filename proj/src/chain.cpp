// Copyright 2026 The chainfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chainfactor/chain.hpp"

#include <algorithm>
#include <set>

#include "chainfactor/errors.hpp"

namespace chainfactor {

ChainPartition::ChainPartition(SiteSpace space, std::vector<Block> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ArgumentError("partition needs at least one block");
  std::set<std::string> names;
  int cursor = 0;
  for (const Block& b : blocks_) {
    if (b.name.empty()) throw ArgumentError("block names must be nonempty");
    if (!names.insert(b.name).second) throw ArgumentError("duplicate block name: " + b.name);
    if (b.size < 0) throw ArgumentError("block sizes must be nonnegative");
    if (b.first != cursor) throw ArgumentError("blocks must tile the chain in order");
    cursor += b.size;
  }
  if (cursor != space_.sites()) throw ArgumentError("blocks must cover every site");
}

ChainPartition ChainPartition::tripartite(const SiteSpace& space, int a, int b, int c) {
  return ChainPartition(space, {{"A", 0, a}, {"B", a, b}, {"C", a + b, c}});
}

ChainPartition ChainPartition::buffered(const SiteSpace& space, int a_buf, int a, int b, int c,
                                        int c_buf) {
  return ChainPartition(space, {{"A'", 0, a_buf},
                                {"A", a_buf, a},
                                {"B", a_buf + a, b},
                                {"C", a_buf + a + b, c},
                                {"C'", a_buf + a + b + c, c_buf}});
}

ChainPartition ChainPartition::uniform_blocks(const SiteSpace& space, int block_len) {
  if (block_len < 1) throw ArgumentError("block length must be positive");
  const int n = space.sites();
  int count = n / block_len;
  if (count == 0) count = 1;
  std::vector<Block> blocks;
  for (int i = 0; i < count; ++i) {
    const int first = i * block_len;
    const int size = (i == count - 1) ? n - first : block_len;
    blocks.push_back({"A" + std::to_string(i + 1), first, size});
  }
  return ChainPartition(space, std::move(blocks));
}

const Block& ChainPartition::block(const std::string& name) const {
  for (const Block& b : blocks_) {
    if (b.name == name) return b;
  }
  throw ArgumentError("no block named " + name);
}

bool ChainPartition::has_block(const std::string& name) const {
  for (const Block& b : blocks_) {
    if (b.name == name) return true;
  }
  return false;
}

std::vector<int> ChainPartition::sites(const std::vector<std::string>& names) const {
  std::vector<int> out;
  for (const std::string& name : names) {
    const Block& b = block(name);
    for (int i = 0; i < b.size; ++i) out.push_back(b.first + i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> ChainPartition::sites(std::initializer_list<std::string> names) const {
  return sites(std::vector<std::string>(names));
}

ChainPartition restrict_partition(const ChainPartition& p,
                                  const std::vector<std::string>& names) {
  std::set<std::string> wanted(names.begin(), names.end());
  if (wanted.size() != names.size()) throw ArgumentError("duplicate block name in restriction");
  std::vector<Block> kept;
  int first_index = -1, last_index = -1;
  const auto& all = p.blocks();
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    if (wanted.count(all[i].name) == 0) continue;
    if (first_index < 0) first_index = i;
    if (last_index >= 0 && last_index != i - 1) {
      throw ArgumentError("restricted blocks must be consecutive");
    }
    last_index = i;
    kept.push_back(all[i]);
    wanted.erase(all[i].name);
  }
  if (!wanted.empty()) throw ArgumentError("no block named " + *wanted.begin());
  const int shift = kept.front().first;
  std::vector<int> union_sites;
  for (Block& b : kept) {
    for (int i = 0; i < b.size; ++i) union_sites.push_back(b.first + i);
    b.first -= shift;
  }
  return ChainPartition(p.space().subspace(union_sites), std::move(kept));
}

}  // namespace chainfactor
