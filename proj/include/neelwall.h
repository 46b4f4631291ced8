/*
 * neelwall.h
 * C interface to the neelwall solver library. All entry points return an
 * nw_status; on failure nw_last_error_message() describes what went wrong
 * (the message is thread-local). Handles are opaque and must be released
 * with their matching *_free function. The heavyweight entry points accept
 * the same JSON configuration documents the command line tool consumes.
 */
#ifndef NEELWALL_H
#define NEELWALL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nw_status {
    NW_OK = 0,
    NW_ERR_INVALID_ARGUMENT = 1,
    NW_ERR_DIMENSION = 2,
    NW_ERR_SOLVER_FAILURE = 3,
    NW_ERR_VALIDITY_EXIT = 4,
    NW_ERR_IO = 5,
    NW_ERR_RESOURCE = 6,
    NW_ERR_INTERNAL = 7
} nw_status;

typedef struct nw_wall nw_wall;
typedef struct nw_trajectory nw_trajectory;
typedef struct nw_orbits nw_orbits;

const char* nw_version(void);
const char* nw_last_error_message(void);
void nw_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Stray-field symbol                                                  */
/* ------------------------------------------------------------------ */
nw_status nw_symbol(double xi, double epsilon, double* out);
nw_status nw_rescaled_symbol(double xi, double epsilon, double* out);

/* ------------------------------------------------------------------ */
/* Static wall                                                          */
/* ------------------------------------------------------------------ */
/* config keys: parameters{kappa,epsilon,alpha} or physical{d,delta,Q,alpha},
 * grid{half_length,n}, wall{...solver options...}. */
nw_status nw_wall_solve(const char* config_json, nw_wall** out);
nw_status nw_wall_load(const char* path, nw_wall** out);
nw_status nw_wall_save(const nw_wall* wall, const char* path);
void nw_wall_free(nw_wall* wall);

int nw_wall_grid_size(const nw_wall* wall);
double nw_wall_half_length(const nw_wall* wall);
/* buffers of length nw_wall_grid_size() */
nw_status nw_wall_nodes(const nw_wall* wall, double* out);
nw_status nw_wall_theta(const nw_wall* wall, double* out);
nw_status nw_wall_theta_prime(const nw_wall* wall, double* out);
/* diagnostics as a JSON string (caller frees with nw_string_free) */
nw_status nw_wall_diagnostics(const nw_wall* wall, char** json_out);

/* ------------------------------------------------------------------ */
/* Spectral certification                                               */
/* ------------------------------------------------------------------ */
/* Assembles L1, L2 and L0 (per configured alpha values) on the coarse grid,
 * runs the spectra and claim checks, and returns one JSON document.
 * config keys: parameters, spectrum{coarse_n, coarse_half_length, alphas,
 * block_lemma{trials,size,alphas,seed}}. */
nw_status nw_spectrum_run(const char* config_json, char** json_out);

/* ------------------------------------------------------------------ */
/* Time integration                                                     */
/* ------------------------------------------------------------------ */
/* config keys: parameters, grid, wall, forcing{kind,period,lambda,gamma,
 * table}, evolve{t_final,dt,scheme,snapshots,initial{kind,amplitude}}. */
nw_status nw_evolve_run(const char* config_json, nw_trajectory** out);
void nw_trajectory_free(nw_trajectory* t);

int nw_trajectory_snapshot_count(const nw_trajectory* t);
int nw_trajectory_grid_size(const nw_trajectory* t);
double nw_trajectory_half_length(const nw_trajectory* t);
double nw_trajectory_snapshot_time(const nw_trajectory* t, int i);
nw_status nw_trajectory_snapshot(const nw_trajectory* t, int i, double* phi, double* vartheta,
                                 double* theta);
int nw_trajectory_validity_exit(const nw_trajectory* t, double* exit_time);
/* diagnostics series as JSON (times, max_phi, energy, kernel_drift, norm) */
nw_status nw_trajectory_diagnostics(const nw_trajectory* t, char** json_out);

/* ------------------------------------------------------------------ */
/* Periodic orbits                                                      */
/* ------------------------------------------------------------------ */
/* config keys: parameters, grid, wall, forcing, periodic{lambda_max,steps,
 * dt,scheme,coarse_modes,tol,...}. Returns NW_OK with a possibly partial
 * family; nw_orbits_completed reports whether the march reached lambda_max. */
nw_status nw_periodic_run(const char* config_json, nw_orbits** out);
nw_status nw_orbits_load(const char* path, nw_orbits** out);
nw_status nw_orbits_save(const nw_orbits* o, const char* path);
void nw_orbits_free(nw_orbits* o);

int nw_orbits_count(const nw_orbits* o);
int nw_orbits_completed(const nw_orbits* o);
int nw_orbits_grid_size(const nw_orbits* o);
nw_status nw_orbits_summary(const nw_orbits* o, int i, double* lambda, double* gamma,
                            double* residual, int* newton_iterations);
nw_status nw_orbits_initial_state(const nw_orbits* o, int i, double* phi0, double* vartheta0);
/* re-integration verification of one orbit as JSON */
nw_status nw_orbits_verify(const nw_orbits* o, int i, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* NEELWALL_H */
