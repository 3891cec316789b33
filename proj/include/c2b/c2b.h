#ifndef C2B_H
#define C2B_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes. */
typedef enum c2b_status {
  C2B_OK = 0,
  C2B_ERROR_INPUT = 2,
  C2B_ERROR_NUMERIC = 3,
  C2B_ERROR_IO = 4,
} c2b_status;

/* Message for the last failing call on this thread; empty string if none. */
const char* c2b_last_error(void);

/* Opaque parametric body model handle. */
typedef struct c2b_model c2b_model;

c2b_status c2b_model_synth(uint64_t seed, int joint_count, int shape_dims,
                           int vertex_budget, c2b_model** out);
c2b_status c2b_model_load(const char* path, c2b_model** out);
void c2b_model_release(c2b_model* model);

int c2b_model_vertex_count(const c2b_model* model);
int c2b_model_joint_count(const c2b_model* model);
int c2b_model_shape_dims(const c2b_model* model);

/* Rest joint positions for a shape vector, written as joint_count*3 doubles
 * (x y z per joint). beta_len must match the model's shape dims. */
c2b_status c2b_model_rest_joints(const c2b_model* model, const double* beta,
                                 int beta_len, double* out_xyz);

/* Skinned vertex positions for a shape and pose. rotations holds
 * joint_count row-major 3x3 matrices, root_translation 3 doubles, and
 * out_xyz receives vertex_count*3 doubles. */
c2b_status c2b_model_skin(const c2b_model* model, const double* beta,
                          int beta_len, const double* rotations,
                          const double* root_translation, double* out_xyz);

/* Workflow runs mirroring the CLI subcommands. Every path argument marked
 * nullable may be NULL; config_path NULL means built-in defaults. anchors
 * is a "parent:child,parent:child" bone list overriding the config. */
c2b_status c2b_synth_run(uint64_t seed, int pose_db_size, const char* category,
                         const char* config_path, const char* out_dir);
c2b_status c2b_fit_run(const char* scenario_path, const char* config_path,
                       const char* anchors, double temperature, uint64_t seed,
                       const char* out_dir);
c2b_status c2b_evolve_run(const char* scenario_path, const char* db_path,
                          const char* config_path, int count, int k,
                          double epsilon, uint64_t seed, const char* out_dir);
c2b_status c2b_eval_run(const char* pred_dir, const char* scenario_path,
                        const char* out_path);
c2b_status c2b_measure_run(const char* input_path, const char* model_path,
                           const char* config_path, const char* const* edits,
                           int edit_count, int write_mesh, const char* out_dir);
c2b_status c2b_export_mesh_run(const char* model_path, const char* beta_path,
                               const char* pose_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
