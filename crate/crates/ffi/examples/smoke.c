/* cc smoke.c -I../include <target>/debug/libqukit_ffi.a -lm -lpthread -ldl */
#include <stdio.h>
#include "qukit.h"

int main(void) {
    QkComplex tau[2] = {{0.5, 0.2}, {0.0, -1.0}};
    QkState *psi = NULL;
    if (qk_coherent_product(3, 3, tau, 2, &psi) != QK_STATUS_OK) {
        fprintf(stderr, "%s\n", qk_last_error_message());
        return 1;
    }
    bool product = false;
    double defect = 1.0;
    qk_is_product(psi, 1e-10, &product, &defect);
    printf("coherent: product=%d defect=%.2e\n", product, defect);
    qk_state_free(psi);

    size_t counts[3] = {1, 2, 0};
    QkState *dicke = NULL;
    qk_dicke(counts, 3, &dicke);
    qk_is_product(dicke, 1e-10, &product, NULL);
    printf("dicke (1,2,0): product=%d\n", product);
    qk_state_free(dicke);

    QkComplex one = {1.0, 0.0};
    QkStatus status = qk_state_new(2, 2, &one, 1, &psi);
    printf("bad length: status=%d (%s)\n", status, qk_last_error_message());
    return status == QK_STATUS_SHAPE ? 0 : 1;
}
