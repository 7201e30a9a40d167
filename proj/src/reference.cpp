#include "naf/reference.hpp"

namespace naf::ref {

ProjectionSet project_volume_serial(const Volume& vol, const ScanGeometry& geom,
                                    int samples_per_ray) {
    geom.validate();
    if (samples_per_ray < std::max({vol.nx, vol.ny, vol.nz}))
        throw ValidationError("project_volume: samples_per_ray must be >= max(dims)");

    ProjectionSet proj;
    proj.geometry = geom;
    proj.images.assign(
        size_t(geom.num_views) * geom.detector_rows * geom.detector_cols, 1.0f);
    double length_unit = geom.volume_extent.max_side();
    std::vector<double> angles = view_angles(geom);

    for (int view = 0; view < geom.num_views; ++view)
        for (int row = 0; row < geom.detector_rows; ++row)
            for (int col = 0; col < geom.detector_cols; ++col) {
                Ray ray = pixel_ray(geom, angles[view], row, col);
                if (!ray.hit) continue;
                double dt = (ray.t_far - ray.t_near) / samples_per_ray;
                double integral = 0.0;
                for (int s = 0; s < samples_per_ray; ++s) {
                    double t = ray.t_near + (s + 0.5) * dt;
                    Vec3 p = ray.origin + ray.direction * t;
                    double delta = (s + 1 < samples_per_ray) ? dt : dt * 0.5;
                    integral += vol.sample(p) * delta;
                }
                proj.at(view, row, col) = float(std::exp(-integral / length_unit));
            }
    return proj;
}

Volume extract_volume_serial(const FieldModel<float>& model, int nx, int ny, int nz,
                             const Aabb& extent) {
    Volume vol(nx, ny, nz, extent);
    MlpWork<float> work;
    std::vector<float> pts(3);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                model.normalize(vol.voxel_center(i, j, k), pts.data());
                model.forward_batch(pts.data(), 1, work);
                vol.at(i, j, k) = work.Mu[0];
            }
    return vol;
}

}  // namespace naf::ref
