#include "tvdiff/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tvdiff/rng.hpp"

namespace tvdiff::dataset {

namespace fs = std::filesystem;

Index InteractionDataset::train_count() const {
  Index c = 0;
  for (const auto& v : train_items) c += static_cast<Index>(v.size());
  return c;
}

Index InteractionDataset::test_count() const {
  Index c = 0;
  for (const auto& v : test_items) c += static_cast<Index>(v.size());
  return c;
}

bool InteractionDataset::is_train_positive(Index u, Index i) const {
  const auto& v = train_items[static_cast<std::size_t>(u)];
  return std::binary_search(v.begin(), v.end(), i);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void parse_error(const std::string& path, std::size_t lineno,
                              const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::vector<InteractionRecord> load_interactions(const std::string& path,
                                                 TsvFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interactions file: " + path);

  std::vector<InteractionRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::vector<std::string> fields = split_tabs(line);
    const std::size_t want = format == TsvFormat::kPair ? 2 : 3;
    if (fields.size() != want)
      parse_error(path, lineno, "expected " + std::to_string(want) +
                                    " tab-separated fields, got " +
                                    std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      parse_error(path, lineno, "empty user or item token");

    InteractionRecord rec{fields[0], fields[1], 1.0};
    if (format == TsvFormat::kRated) {
      try {
        std::size_t used = 0;
        rec.rating = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument(fields[2]);
      } catch (const std::exception&) {
        parse_error(path, lineno, "unparsable rating '" + fields[2] + "'");
      }
      if (rec.rating <= 0.0) continue;  // binarization: only positive ratings count
    }
    records.push_back(std::move(rec));
  }
  if (records.empty())
    throw std::runtime_error("no interactions parsed from " + path);
  return records;
}

InteractionDataset split_dataset(const std::vector<InteractionRecord>& records,
                                 double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::runtime_error("split ratio must lie in (0,1)");

  InteractionDataset ds;
  std::vector<std::vector<Index>> items_of_user;  // deduplicated, insertion order
  std::vector<std::set<Index>> seen_of_user;

  for (const auto& rec : records) {
    auto [uit, unew] = ds.user_index.try_emplace(rec.user_id, ds.m);
    if (unew) {
      ds.user_ids.push_back(rec.user_id);
      items_of_user.emplace_back();
      seen_of_user.emplace_back();
      ++ds.m;
    }
    auto [iit, inew] = ds.item_index.try_emplace(rec.item_id, ds.n);
    if (inew) {
      ds.item_ids.push_back(rec.item_id);
      ++ds.n;
    }
    const Index u = uit->second;
    const Index i = iit->second;
    if (seen_of_user[static_cast<std::size_t>(u)].insert(i).second)
      items_of_user[static_cast<std::size_t>(u)].push_back(i);
  }

  Index total = 0;
  for (const auto& v : items_of_user) total += static_cast<Index>(v.size());
  if (total < 2)
    throw std::runtime_error("need at least 2 interactions to split");

  ds.train_items.resize(static_cast<std::size_t>(ds.m));
  ds.test_items.resize(static_cast<std::size_t>(ds.m));
  ds.user_degree.assign(static_cast<std::size_t>(ds.m), 0);
  ds.item_degree.assign(static_cast<std::size_t>(ds.n), 0);

  for (Index u = 0; u < ds.m; ++u) {
    auto items = items_of_user[static_cast<std::size_t>(u)];
    Rng rng = Rng::derive(seed, Stream::kSplit, static_cast<std::uint64_t>(u));
    rng.shuffle(items);

    const auto d = static_cast<double>(items.size());
    auto n_train = static_cast<std::size_t>(std::floor(ratio * d + 1e-9));
    n_train = std::max<std::size_t>(n_train, 1);  // every user keeps a train item

    auto& train = ds.train_items[static_cast<std::size_t>(u)];
    auto& test = ds.test_items[static_cast<std::size_t>(u)];
    train.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.assign(items.begin() + static_cast<std::ptrdiff_t>(n_train), items.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    ds.user_degree[static_cast<std::size_t>(u)] = static_cast<Index>(train.size());
    for (Index i : train) ++ds.item_degree[static_cast<std::size_t>(i)];
  }
  return ds;
}

BipartiteMatrices build_matrices(const InteractionDataset& ds) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t_r, t_hat, t_bar;
  const auto nnz = static_cast<std::size_t>(ds.train_count());
  t_r.reserve(nnz);
  t_hat.reserve(nnz);
  t_bar.reserve(nnz);

  for (Index u = 0; u < ds.m; ++u) {
    const double du = static_cast<double>(ds.user_degree[static_cast<std::size_t>(u)]);
    for (Index i : ds.train_items[static_cast<std::size_t>(u)]) {
      const double di = static_cast<double>(ds.item_degree[static_cast<std::size_t>(i)]);
      t_r.emplace_back(u, i, 1.0);
      t_hat.emplace_back(u, i, 1.0 / du);
      t_bar.emplace_back(u, i, 1.0 / std::sqrt(du * di));
    }
  }

  BipartiteMatrices out;
  out.R.resize(ds.m, ds.n);
  out.R_hat.resize(ds.m, ds.n);
  out.R_bar.resize(ds.m, ds.n);
  out.R.setFromTriplets(t_r.begin(), t_r.end());
  out.R_hat.setFromTriplets(t_hat.begin(), t_hat.end());
  out.R_bar.setFromTriplets(t_bar.begin(), t_bar.end());
  out.R.makeCompressed();
  out.R_hat.makeCompressed();
  out.R_bar.makeCompressed();
  return out;
}

namespace {

void write_pairs(const std::string& path,
                 const std::vector<std::vector<Index>>& items) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t u = 0; u < items.size(); ++u)
    for (Index i : items[u]) out << u << '\t' << i << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_map(const std::string& path, const std::vector<std::string>& ids) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t k = 0; k < ids.size(); ++k) out << k << '\t' << ids[k] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void save_split(const InteractionDataset& ds, const std::string& dir,
                double ratio, std::uint64_t seed, bool force) {
  const fs::path root(dir);
  if (fs::exists(root / "meta") && !force)
    throw std::runtime_error("split artifacts already exist in " + dir +
                             " (use force to overwrite)");
  fs::create_directories(root);

  write_pairs((root / "train.tsv").string(), ds.train_items);
  write_pairs((root / "test.tsv").string(), ds.test_items);
  write_map((root / "user_map.tsv").string(), ds.user_ids);
  write_map((root / "item_map.tsv").string(), ds.item_ids);

  std::ofstream meta(root / "meta");
  if (!meta) throw std::runtime_error("cannot write meta in " + dir);
  meta << "format_version = 1\n"
       << "m = " << ds.m << "\n"
       << "n = " << ds.n << "\n"
       << "train_count = " << ds.train_count() << "\n"
       << "test_count = " << ds.test_count() << "\n"
       << "ratio = " << ratio << "\n"
       << "seed = " << seed << "\n";
  if (!meta) throw std::runtime_error("write failed: meta");
}

namespace {

std::vector<std::string> read_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 ||
        fields[0] != std::to_string(ids.size()))
      parse_error(path, lineno, "malformed id map row");
    ids.push_back(fields[1]);
  }
  return ids;
}

void read_pairs(const std::string& path, Index m, Index n,
                std::vector<std::vector<Index>>* items) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  items->assign(static_cast<std::size_t>(m), {});
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) parse_error(path, lineno, "expected u<TAB>i");
    const long u = std::stol(fields[0]);
    const long i = std::stol(fields[1]);
    if (u < 0 || u >= m || i < 0 || i >= n)
      parse_error(path, lineno, "index out of range");
    (*items)[static_cast<std::size_t>(u)].push_back(static_cast<Index>(i));
  }
  for (auto& v : *items) std::sort(v.begin(), v.end());
}

}  // namespace

InteractionDataset load_split(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream meta(root / "meta");
  if (!meta) throw std::runtime_error("cannot open split meta in " + dir);

  Index m = -1, n = -1;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    ls >> key >> eq;
    if (eq != "=") continue;
    if (key == "m") ls >> m;
    if (key == "n") ls >> n;
  }
  if (m <= 0 || n <= 0)
    throw std::runtime_error("split meta in " + dir + " lacks valid m/n");

  InteractionDataset ds;
  ds.m = m;
  ds.n = n;
  ds.user_ids = read_map((root / "user_map.tsv").string());
  ds.item_ids = read_map((root / "item_map.tsv").string());
  if (static_cast<Index>(ds.user_ids.size()) != m ||
      static_cast<Index>(ds.item_ids.size()) != n)
    throw std::runtime_error("id maps in " + dir + " disagree with meta");
  for (Index u = 0; u < m; ++u) ds.user_index[ds.user_ids[static_cast<std::size_t>(u)]] = u;
  for (Index i = 0; i < n; ++i) ds.item_index[ds.item_ids[static_cast<std::size_t>(i)]] = i;

  read_pairs((root / "train.tsv").string(), m, n, &ds.train_items);
  read_pairs((root / "test.tsv").string(), m, n, &ds.test_items);

  ds.user_degree.assign(static_cast<std::size_t>(m), 0);
  ds.item_degree.assign(static_cast<std::size_t>(n), 0);
  for (Index u = 0; u < m; ++u) {
    const auto& train = ds.train_items[static_cast<std::size_t>(u)];
    ds.user_degree[static_cast<std::size_t>(u)] = static_cast<Index>(train.size());
    for (Index i : train) ++ds.item_degree[static_cast<std::size_t>(i)];
  }
  return ds;
}

InteractionDataset holdout_validation(const InteractionDataset& ds,
                                      double fraction, std::uint64_t seed,
                                      std::vector<std::vector<Index>>* held_out) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::runtime_error("validation fraction must lie in (0,1)");

  InteractionDataset core = ds;
  held_out->assign(static_cast<std::size_t>(ds.m), {});
  std::fill(core.item_degree.begin(), core.item_degree.end(), 0);

  for (Index u = 0; u < ds.m; ++u) {
    auto items = ds.train_items[static_cast<std::size_t>(u)];
    const auto d = items.size();
    std::size_t n_hold = 0;
    if (d >= 2) {
      n_hold = static_cast<std::size_t>(
          std::llround(fraction * static_cast<double>(d)));
      n_hold = std::min(std::max<std::size_t>(n_hold, 1), d - 1);
    }
    Rng rng = Rng::derive(seed, Stream::kValSplit, static_cast<std::uint64_t>(u));
    rng.shuffle(items);

    auto& train = core.train_items[static_cast<std::size_t>(u)];
    auto& hold = (*held_out)[static_cast<std::size_t>(u)];
    train.assign(items.begin(), items.end() - static_cast<std::ptrdiff_t>(n_hold));
    hold.assign(items.end() - static_cast<std::ptrdiff_t>(n_hold), items.end());
    std::sort(train.begin(), train.end());
    std::sort(hold.begin(), hold.end());

    core.user_degree[static_cast<std::size_t>(u)] = static_cast<Index>(train.size());
    for (Index i : train) ++core.item_degree[static_cast<std::size_t>(i)];
  }
  // test_items stay untouched; monitors rank held-out items, never test ones.
  return core;
}

}  // namespace tvdiff::dataset
