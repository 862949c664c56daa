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

#ifndef CHAINFACTOR_CHAIN_HPP
#define CHAINFACTOR_CHAIN_HPP

#include <initializer_list>
#include <string>
#include <vector>

#include "chainfactor/site_space.hpp"

namespace chainfactor {

// Contiguous run of sites. size may be zero (empty buffers are legal block
// choices and behave as trivial factors).
struct Block {
  std::string name;
  int first = 0;
  int size = 0;
};

// Ordered partition of a chain into named contiguous blocks covering all
// sites exactly once.
class ChainPartition {
 public:
  ChainPartition(SiteSpace space, std::vector<Block> blocks);

  // A|B|C with sizes a+b+c == n
  static ChainPartition tripartite(const SiteSpace& space, int a, int b, int c);
  // A'|A|B|C|C' with sizes summing to n
  static ChainPartition buffered(const SiteSpace& space, int a_buf, int a, int b, int c,
                                 int c_buf);
  // A1|A2|...|Ak of length block_len each; the last block absorbs the remainder
  static ChainPartition uniform_blocks(const SiteSpace& space, int block_len);

  const SiteSpace& space() const { return space_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(const std::string& name) const;
  bool has_block(const std::string& name) const;

  // sites of the union of the named blocks, strictly increasing; the union
  // need not be contiguous here (marginal construction enforces that)
  std::vector<int> sites(std::initializer_list<std::string> names) const;
  std::vector<int> sites(const std::vector<std::string>& names) const;

 private:
  SiteSpace space_;
  std::vector<Block> blocks_;
};

// Partition induced on the marginal that keeps exactly the named blocks, with
// sites renumbered from 0. The kept blocks must be consecutive in the
// partition order so the marginal is a contiguous window.
ChainPartition restrict_partition(const ChainPartition& p,
                                  const std::vector<std::string>& names);

}  // namespace chainfactor

#endif  // CHAINFACTOR_CHAIN_HPP
