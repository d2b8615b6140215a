#include "taman/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "taman/rng.hpp"

namespace taman {

void SyntheticSpec::validate() const {
  if (class_pairs < 1) fail(ErrorKind::Config, "class_pairs must be >= 1");
  if (domains.size() < 2) fail(ErrorKind::Config, "need at least 2 domains");
  for (const auto& d : domains) {
    if (d.name.empty()) fail(ErrorKind::Config, "domain name must be nonempty");
    if (d.noise_sigma <= 0) fail(ErrorKind::Config, "noise_sigma must be positive");
  }
  if (frame_count < 2) fail(ErrorKind::Config, "frame_count must be >= 2");
  if (feature_dim < 1) fail(ErrorKind::Config, "feature_dim must be >= 1");
  if (videos_per_class < 2) fail(ErrorKind::Config, "videos_per_class must be >= 2");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    fail(ErrorKind::Config, "train_fraction must be in (0, 1)");
}

namespace {

std::vector<double> unit_vector(int dim, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.next_gaussian();
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

std::map<std::string, SyntheticDomainFiles> generate_synthetic(
    const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  const int dim = spec.feature_dim;
  const int h = spec.frame_count;
  const int first_half = (h + 1) / 2;  // odd h: the extra frame goes to the first prototype

  // Class prototypes are shared across domains.
  std::vector<std::vector<double>> proto_u(static_cast<std::size_t>(spec.class_pairs));
  std::vector<std::vector<double>> proto_v(static_cast<std::size_t>(spec.class_pairs));
  for (int c = 0; c < spec.class_pairs; ++c) {
    Rng rng(hash_mix({spec.seed, 0x9107ull, static_cast<std::uint64_t>(c)}));
    proto_u[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(dim));
    proto_v[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) proto_u[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = rng.next_gaussian();
    for (int j = 0; j < dim; ++j) proto_v[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = rng.next_gaussian();
  }

  std::map<std::string, SyntheticDomainFiles> out;
  for (std::size_t di = 0; di < spec.domains.size(); ++di) {
    const SyntheticDomain& domain = spec.domains[di];
    const std::filesystem::path dom_dir = out_dir / domain.name;
    std::filesystem::create_directories(dom_dir);

    std::vector<double> bias(static_cast<std::size_t>(dim), 0.0);
    if (domain.bias_scale != 0.0) {
      Rng rng(hash_mix({spec.seed, 0xB1A5ull, fnv1a64(domain.name)}));
      bias = unit_vector(dim, rng);
      for (double& x : bias) x *= domain.bias_scale;
    }

    Manifest train, train_unlabeled, test;
    train.class_count = train_unlabeled.class_count = test.class_count = spec.label_count();

    const int train_per_class =
        std::max(1, static_cast<int>(spec.train_fraction * spec.videos_per_class));

    for (int label = 0; label < spec.label_count(); ++label) {
      const int pair = label % spec.class_pairs;
      const bool reversed = label >= spec.class_pairs;
      const auto& first = reversed ? proto_v[static_cast<std::size_t>(pair)] : proto_u[static_cast<std::size_t>(pair)];
      const auto& second = reversed ? proto_u[static_cast<std::size_t>(pair)] : proto_v[static_cast<std::size_t>(pair)];

      for (int vid = 0; vid < spec.videos_per_class; ++vid) {
        Rng rng(hash_mix({spec.seed, 0x51Dull, fnv1a64(domain.name),
                          static_cast<std::uint64_t>(label), static_cast<std::uint64_t>(vid)}));
        MatF frames(h, dim);
        for (int f = 0; f < h; ++f) {
          const auto& proto = f < first_half ? first : second;
          for (int j = 0; j < dim; ++j)
            frames(f, j) = static_cast<float>(proto[static_cast<std::size_t>(j)] + bias[static_cast<std::size_t>(j)] +
                                              domain.noise_sigma * rng.next_gaussian());
        }
        char name[64];
        std::snprintf(name, sizeof(name), "c%02d_v%04d.tmnf", label, vid);
        write_features(dom_dir / name, frames);

        const std::string rel = domain.name + "/" + name;
        if (vid < train_per_class) {
          train.records.push_back({rel, label, domain.name});
          train_unlabeled.records.push_back({rel, -1, domain.name});
        } else {
          test.records.push_back({rel, label, domain.name});
        }
      }
    }

    SyntheticDomainFiles files;
    files.train = out_dir / (domain.name + "_train.manifest");
    files.train_unlabeled = out_dir / (domain.name + "_train_unlabeled.manifest");
    files.test = out_dir / (domain.name + "_test.manifest");
    save_manifest(files.train, train);
    save_manifest(files.train_unlabeled, train_unlabeled);
    save_manifest(files.test, test);
    out.emplace(domain.name, std::move(files));
  }
  return out;
}

}  // namespace taman
