/* Cluster runtime interface used by translated programs.
 *
 * On the board these map onto the PMSIS cluster calls; on a host they are
 * provided by a thread-based double (see tests/fixtures/host_shim).
 */
#ifndef GAP_SHIM_H
#define GAP_SHIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define GAP_CLUSTER_CORES 8

/* fabric controller side */
void CLUSTER_Start(int cid, int nb_cores);
void CLUSTER_SendTask(int cid, void (*master)(void *), void *arg, void (*callback)(void *));
void CLUSTER_Wait(int cid);
void CLUSTER_Stop(int cid);

/* cluster side */
void CLUSTER_CoresFork(void (*worker)(void *), void *arg);
int CLUSTER_CoreId(void);
int CLUSTER_TeamSize(void);
void CLUSTER_Barrier(void);

void GAP_CriticalEnter(void);
void GAP_CriticalExit(void);
#define CRITICAL_ENTER() GAP_CriticalEnter()
#define CRITICAL_EXIT() GAP_CriticalExit()

/* shared L1 */
void *L1_Malloc(size_t size);
void L1_Free(void *ptr, size_t size);
size_t L1_HighWater(void);

#ifdef __cplusplus
}
#endif

#endif
